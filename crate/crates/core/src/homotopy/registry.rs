use std::collections::BTreeMap;

use super::{aug_h_h, aug_h_v, h_h, h_h_divfree_first, h_h_divfree_second, h_h_tilde, h_v, ibp_homotopy, HomotopyError};
use crate::algebra::FormCombo;

/// A homotopy operator selectable at runtime.
pub trait Homotopy: Send + Sync {
    fn name(&self) -> &'static str;
    fn description(&self) -> &'static str;
    fn apply(&self, c: &FormCombo) -> Result<FormCombo, HomotopyError>;
}

struct FnHomotopy {
    name: &'static str,
    description: &'static str,
    op: fn(&FormCombo) -> Result<FormCombo, HomotopyError>,
}

impl Homotopy for FnHomotopy {
    fn name(&self) -> &'static str {
        self.name
    }

    fn description(&self) -> &'static str {
        self.description
    }

    fn apply(&self, c: &FormCombo) -> Result<FormCombo, HomotopyError> {
        (self.op)(c)
    }
}

#[derive(Default)]
pub struct HomotopyRegistry {
    ops: BTreeMap<&'static str, Box<dyn Homotopy>>,
}

impl HomotopyRegistry {
    pub fn new() -> Self {
        Self::default()
    }

    /// Registry holding every built-in operator.
    pub fn standard() -> Self {
        let mut r = Self::new();
        let builtin: [(&'static str, &'static str, fn(&FormCombo) -> Result<FormCombo, HomotopyError>); 8] = [
            ("hH", "horizontal homotopy Ω_{n,p} → Ω_{n+1,p}", h_h),
            ("hV", "vertical homotopy Ω_{n,p} → Ω_{n,p-1}", h_v),
            ("ibp", "integration-by-parts homotopy on Ω_{0,p}", ibp_homotopy),
            ("divfree", "divergence-free horizontal homotopy, modulo 1-loops", h_h_tilde),
            ("divfree1", "modified divergence-free homotopy h̃(1 + E/(N-1))", h_h_divfree_first),
            ("divfree2", "modified divergence-free homotopy h̃(1 + E_r/(N-1))", h_h_divfree_second),
            ("aug", "augmented horizontal homotopy on Ω_{0,p}, p ≥ 1", aug_h_h),
            ("augV", "augmented vertical homotopy I∘h_V", aug_h_v),
        ];
        for (name, description, op) in builtin {
            r.register(Box::new(FnHomotopy { name, description, op }));
        }
        r
    }

    pub fn register(&mut self, op: Box<dyn Homotopy>) {
        self.ops.insert(op.name(), op);
    }

    pub fn get(&self, name: &str) -> Option<&dyn Homotopy> {
        self.ops.get(name).map(|b| b.as_ref())
    }

    pub fn names(&self) -> Vec<&'static str> {
        self.ops.keys().copied().collect()
    }

    pub fn apply(&self, name: &str, c: &FormCombo) -> Result<FormCombo, HomotopyError> {
        self.get(name)
            .ok_or_else(|| HomotopyError::Domain(format!("unknown homotopy '{name}'")))?
            .apply(c)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lookup() {
        let r = HomotopyRegistry::standard();
        assert!(r.names().contains(&"ibp"));
        let c = FormCombo::parse("<b>").unwrap();
        assert_eq!(r.apply("hH", &c).unwrap(), FormCombo::parse("b").unwrap());
        assert!(r.apply("nope", &c).is_err());
    }
}
