use super::{Component, ComponentId, ComponentRequest, ComponentResponse, TOPIC_OFFER};

const DEFLECTION: &str =
    "I'd rather not take sides on that one. I'm better at sharing facts than opinions.";

pub struct OpinionComponent;

impl Component for OpinionComponent {
    fn id(&self) -> ComponentId {
        ComponentId::Opinion
    }

    fn respond(&self, _request: &ComponentRequest<'_>) -> ComponentResponse {
        ComponentResponse::offer(
            DEFLECTION,
            TOPIC_OFFER,
            ComponentId::Transition,
            "offer_topics",
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::components::testing::{session, turn};
    use crate::intent::IntentLabel;

    #[test]
    fn deflects_and_offers_topics() {
        let r = turn(
            &OpinionComponent,
            &mut session(),
            IntentLabel::Opinion,
            "what do you think of taxes",
        );
        assert!(r.text.starts_with(DEFLECTION));
        assert_eq!(
            r.followup_offer.unwrap().accept_route,
            ComponentId::Transition
        );
    }
}
