//! Primitive-operation counters for query instrumentation.

/// Receives one tick per primitive operation (bitvector, tree or table access).
pub trait Tally {
    fn tick(&mut self);
    /// A node or table entry of a multi-level structure was entered.
    fn visit(&mut self) {}
}

/// Counter that compiles away.
#[derive(Clone, Copy, Debug, Default)]
pub struct NoTally;

impl Tally for NoTally {
    #[inline(always)]
    fn tick(&mut self) {}
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct OpCount {
    pub ops: u64,
    pub visits: u64,
}

impl Tally for OpCount {
    #[inline]
    fn tick(&mut self) {
        self.ops += 1;
    }

    #[inline]
    fn visit(&mut self) {
        self.visits += 1;
    }
}
