use serde::{Deserialize, Serialize};

/// Outcome of a diagnostic. INCONCLUSIVE is a regular outcome, not an error.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Verdict {
    Pass,
    Fail,
    Inconclusive,
}

impl Verdict {
    /// PASS only if every part passes; any FAIL wins; otherwise INCONCLUSIVE.
    pub fn combine(parts: impl IntoIterator<Item = Verdict>) -> Verdict {
        let mut all_pass = true;
        let mut any = false;
        for v in parts {
            any = true;
            match v {
                Verdict::Fail => return Verdict::Fail,
                Verdict::Inconclusive => all_pass = false,
                Verdict::Pass => {}
            }
        }
        if any && all_pass {
            Verdict::Pass
        } else {
            Verdict::Inconclusive
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Pass => "PASS",
            Verdict::Fail => "FAIL",
            Verdict::Inconclusive => "INCONCLUSIVE",
        }
    }
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}
