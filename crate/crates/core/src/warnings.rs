use std::collections::BTreeSet;
use std::sync::Mutex;

/// Deduplicating, thread-safe warning sink. Each distinct message is kept
/// (and logged) once.
#[derive(Debug, Default)]
pub struct WarningLog {
    seen: Mutex<BTreeSet<String>>,
}

impl WarningLog {
    pub fn new() -> Self {
        Self::default()
    }

    /// Record `message`; returns `true` the first time it is seen.
    pub fn warn(&self, message: impl Into<String>) -> bool {
        let message = message.into();
        let mut seen = self.seen.lock().unwrap_or_else(|e| e.into_inner());
        if seen.contains(&message) {
            return false;
        }
        log::warn!("{message}");
        seen.insert(message);
        true
    }

    pub fn messages(&self) -> Vec<String> {
        let seen = self.seen.lock().unwrap_or_else(|e| e.into_inner());
        seen.iter().cloned().collect()
    }

    pub fn is_empty(&self) -> bool {
        self.seen.lock().map(|s| s.is_empty()).unwrap_or(false)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dedups() {
        let log = WarningLog::new();
        assert!(log.warn("a"));
        assert!(!log.warn("a"));
        assert!(log.warn("b"));
        assert_eq!(log.messages(), ["a", "b"]);
    }
}
