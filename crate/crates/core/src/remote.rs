use std::time::Duration;

use serde::de::DeserializeOwned;

/// Minimal JSON-over-HTTP GET client shared by the remote knowledge, wiki and
/// weather connectors.
#[derive(Debug, Clone)]
pub(crate) struct HttpJson {
    agent: ureq::Agent,
    endpoint: String,
}

impl HttpJson {
    pub(crate) fn new(endpoint: impl Into<String>, timeout: Duration) -> Self {
        let agent: ureq::Agent = ureq::Agent::config_builder()
            .timeout_global(Some(timeout))
            .build()
            .into();
        Self {
            agent,
            endpoint: endpoint.into(),
        }
    }

    pub(crate) fn endpoint(&self) -> &str {
        &self.endpoint
    }

    /// `Ok(None)` on 404, `Err` with a message on any other failure.
    pub(crate) fn get<T: DeserializeOwned>(
        &self,
        params: &[(&str, &str)],
    ) -> Result<Option<T>, String> {
        let mut request = self.agent.get(&self.endpoint);
        for (k, v) in params {
            request = request.query(*k, *v);
        }
        match request.call() {
            Ok(mut response) => response
                .body_mut()
                .read_json::<T>()
                .map(Some)
                .map_err(|e| e.to_string()),
            Err(ureq::Error::StatusCode(404)) => Ok(None),
            Err(e) => Err(e.to_string()),
        }
    }
}

/// Serves `responses` (status, JSON body) to successive connections on a
/// local port and returns the base URL.
#[cfg(test)]
pub(crate) fn serve_canned(responses: Vec<(u16, String)>) -> String {
    use std::io::{BufRead, BufReader, Write};
    use std::net::TcpListener;

    let listener = TcpListener::bind("127.0.0.1:0").unwrap();
    let addr = listener.local_addr().unwrap();
    std::thread::spawn(move || {
        for (status, body) in responses {
            let Ok((stream, _)) = listener.accept() else {
                return;
            };
            let mut reader = BufReader::new(stream);
            let mut line = String::new();
            while reader.read_line(&mut line).map(|n| n > 0).unwrap_or(false) {
                if line == "\r\n" {
                    break;
                }
                line.clear();
            }
            let mut stream = reader.into_inner();
            let _ = write!(
                stream,
                "HTTP/1.1 {status} X\r\nContent-Type: application/json\r\nContent-Length: {}\r\nConnection: close\r\n\r\n{body}",
                body.len()
            );
        }
    });
    format!("http://{addr}/lookup")
}
