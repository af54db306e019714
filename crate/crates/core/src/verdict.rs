use core::fmt;

/// Outcome of a check that can only be carried out on a finite stage prefix.
///
/// `Holds` means no counterexample was found in the prefix; for a source
/// that keeps growing this is evidence, not proof. `Refuted` always carries
/// a counterexample that stays a counterexample at every later stage.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict<W> {
    Holds,
    Refuted(W),
    Unknown,
}

impl<W> Verdict<W> {
    pub fn holds(&self) -> bool {
        matches!(self, Verdict::Holds)
    }

    pub fn is_refuted(&self) -> bool {
        matches!(self, Verdict::Refuted(_))
    }

    pub fn witness(&self) -> Option<&W> {
        match self {
            Verdict::Refuted(w) => Some(w),
            _ => None,
        }
    }

    pub fn map<V>(self, f: impl FnOnce(W) -> V) -> Verdict<V> {
        match self {
            Verdict::Holds => Verdict::Holds,
            Verdict::Refuted(w) => Verdict::Refuted(f(w)),
            Verdict::Unknown => Verdict::Unknown,
        }
    }

    /// Combine two verdicts: a refutation wins, then an unknown.
    pub fn and(self, other: Verdict<W>) -> Verdict<W> {
        match (self, other) {
            (Verdict::Refuted(w), _) | (_, Verdict::Refuted(w)) => Verdict::Refuted(w),
            (Verdict::Unknown, _) | (_, Verdict::Unknown) => Verdict::Unknown,
            _ => Verdict::Holds,
        }
    }

    /// Short lowercase tag used by report renderers.
    pub fn tag(&self) -> &'static str {
        match self {
            Verdict::Holds => "holds",
            Verdict::Refuted(_) => "refuted",
            Verdict::Unknown => "unknown",
        }
    }
}

impl<W: fmt::Debug> fmt::Display for Verdict<W> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::Holds => f.write_str("holds"),
            Verdict::Refuted(w) => write!(f, "refuted({w:?})"),
            Verdict::Unknown => f.write_str("unknown"),
        }
    }
}

/// Outcome of searching for a missing pair: definitive when the source is
/// static or the pair is decidable, unknown otherwise.
pub(crate) fn absent<W>(definitive: bool, witness: W) -> Verdict<W> {
    if definitive {
        Verdict::Refuted(witness)
    } else {
        Verdict::Unknown
    }
}
