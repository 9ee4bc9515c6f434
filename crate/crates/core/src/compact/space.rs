//! Per-component bit accounting.

/// One stored component: its physical size, its model size and whether it
/// belongs to the payload.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpaceComponent {
    pub name: String,
    pub physical_bits: u64,
    pub model_bits: u64,
    pub payload: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SpaceReport {
    pub n: usize,
    pub components: Vec<SpaceComponent>,
    /// `lg` of the class growth constant, when known.
    pub lg_growth: Option<f64>,
}

impl SpaceReport {
    pub fn new(n: usize) -> Self {
        Self { n, components: Vec::new(), lg_growth: None }
    }

    pub fn push(&mut self, name: &str, physical_bits: u64, model_bits: u64, payload: bool) {
        self.components.push(SpaceComponent { name: name.to_string(), physical_bits, model_bits, payload });
    }

    pub fn component(&self, name: &str) -> Option<&SpaceComponent> {
        self.components.iter().find(|c| c.name == name)
    }

    pub fn payload_bits(&self) -> u64 {
        self.components.iter().filter(|c| c.payload).map(|c| c.model_bits).sum()
    }

    /// Model bits of everything outside the payload.
    pub fn overhead_bits(&self) -> u64 {
        self.components.iter().filter(|c| !c.payload).map(|c| c.model_bits).sum()
    }

    pub fn model_bits(&self) -> u64 {
        self.components.iter().map(|c| c.model_bits).sum()
    }

    pub fn physical_bits(&self) -> u64 {
        self.components.iter().map(|c| c.physical_bits).sum()
    }

    pub fn payload_per_element(&self) -> f64 {
        self.payload_bits() as f64 / self.n.max(1) as f64
    }

    /// Twice `n·lg s` when the growth constant is known: one copy per axis.
    pub fn payload_target(&self) -> Option<f64> {
        self.lg_growth.map(|g| 2.0 * g * self.n as f64)
    }
}
