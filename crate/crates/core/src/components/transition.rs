use super::{Component, ComponentId, ComponentRequest, ComponentResponse};
use crate::transition::{build_reminder, RefusalOutcome};

/// Handles topic changes: refusals of a suggestion and requests for the
/// list of topics.
pub struct TransitionComponent;

impl Component for TransitionComponent {
    fn id(&self) -> ComponentId {
        ComponentId::Transition
    }

    fn respond(&self, request: &ComponentRequest<'_>) -> ComponentResponse {
        match request.route.refusal {
            Some(RefusalOutcome::Continue) => ComponentResponse::say("No problem."),
            Some(RefusalOutcome::Reminder) | None => {
                ComponentResponse::say(build_reminder(request.session))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::components::testing::{decision, route, session};
    use crate::components::ComponentRequest;
    use crate::intent::IntentLabel;

    #[test]
    fn refusal_outcomes() {
        let s = session();
        let d = decision(IntentLabel::Negative);
        let mut r = route(ComponentId::Transition, "no");
        let ask = |r: &crate::dialogue::RoutingResult| {
            TransitionComponent
                .respond(&ComponentRequest {
                    resolved_text: "no",
                    tokens: &[],
                    session: &s,
                    decision: &d,
                    route: r,
                })
                .text
        };
        r.refusal = Some(RefusalOutcome::Continue);
        assert_eq!(ask(&r), "No problem.");
        r.refusal = Some(RefusalOutcome::Reminder);
        assert!(ask(&r).starts_with("I can talk about Basketball"));
        r.refusal = None;
        assert!(ask(&r).ends_with('?'));
    }
}
