use serde::Serialize;

/// Local-hidden-variable bound common to all three CHSH-style combinations.
pub const LOCAL_BOUND: f64 = 2.0;

/// Quantum (Tsirelson) bound.
pub const TSIRELSON_BOUND: f64 = 2.0 * std::f64::consts::SQRT_2;

/// Which Bell test produced a value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum BellTest {
    /// Displaced parity (phase-space) test.
    Dp,
    /// Dichotomized homodyne test.
    Hd,
    /// Pseudospin test.
    Ps,
}

impl BellTest {
    pub fn name(&self) -> &'static str {
        match self {
            BellTest::Dp => "dp",
            BellTest::Hd => "hd",
            BellTest::Ps => "ps",
        }
    }
}

impl std::fmt::Display for BellTest {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// Outcome of one Bell-test evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BellResult {
    pub test: BellTest,
    pub value: f64,
    /// `|value| > 2`.
    pub violated: bool,
}

impl BellResult {
    pub fn new(test: BellTest, value: f64) -> Self {
        Self {
            test,
            value,
            violated: value.abs() > LOCAL_BOUND,
        }
    }
}
