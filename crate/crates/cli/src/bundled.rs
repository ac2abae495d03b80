//! Scenarios shipped with the binary.

pub struct Bundled {
    pub name: &'static str,
    pub source: &'static str,
}

pub const SCENARIOS: &[Bundled] = &[
    Bundled { name: "thm21_forward", source: include_str!("../scenarios/thm21_forward.dlab") },
    Bundled { name: "nonlinear_witness", source: include_str!("../scenarios/nonlinear_witness.dlab") },
    Bundled { name: "power_rule", source: include_str!("../scenarios/power_rule.dlab") },
    Bundled { name: "reciprocal", source: include_str!("../scenarios/reciprocal.dlab") },
    Bundled { name: "nishiyama", source: include_str!("../scenarios/nishiyama.dlab") },
    Bundled { name: "kannappan_kurepa", source: include_str!("../scenarios/kannappan_kurepa.dlab") },
    Bundled { name: "chi_identity", source: include_str!("../scenarios/chi_identity.dlab") },
    Bundled { name: "composite", source: include_str!("../scenarios/composite.dlab") },
    Bundled { name: "mobius_forward", source: include_str!("../scenarios/mobius_forward.dlab") },
    Bundled { name: "automorphism", source: include_str!("../scenarios/automorphism.dlab") },
    Bundled { name: "linearity", source: include_str!("../scenarios/linearity.dlab") },
    Bundled { name: "rational_power", source: include_str!("../scenarios/rational_power.dlab") },
    Bundled { name: "split_identity", source: include_str!("../scenarios/split_identity.dlab") },
];

pub fn find(name: &str) -> Option<&'static Bundled> {
    SCENARIOS.iter().find(|b| b.name == name)
}

impl Bundled {
    /// The `anchor` line of the scenario.
    pub fn anchor(&self) -> &'static str {
        self.header("anchor")
    }

    pub fn title(&self) -> &'static str {
        self.header("title")
    }

    fn header(&self, key: &str) -> &'static str {
        self.source
            .lines()
            .find_map(|l| l.strip_prefix(key).filter(|r| r.starts_with(' ')))
            .map(str::trim)
            .unwrap_or("")
    }
}
