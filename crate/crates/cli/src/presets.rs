//! Built-in experiments, one per reference figure setup.

use caaoi::sim::PolicyKind;
use caaoi::{Csi, MetricKind};

use crate::config::{Config, PolicyEntry, RandomSystem, SensorEntry, SweepEntry, SCHEMA_VERSION};

pub struct Preset {
    pub name: &'static str,
    pub summary: &'static str,
    pub build: fn() -> Config,
}

pub const PRESETS: [Preset; 10] = [
    Preset {
        name: "fig3",
        summary: "Three sensors without CSI, p = [0.1, 0.9, p3], w = [1, 1, 100]; p3 swept 0 to 1.",
        build: fig3,
    },
    Preset {
        name: "fig4",
        summary: "Two sensors without CSI, p1 = 0.1, w = [1000, 1]; p2 swept 0.1 to 0.9.",
        build: fig4,
    },
    Preset {
        name: "fig5",
        summary: "n sensors without CSI, weights uniform on [1, 100], p uniform on [0, 1]; n swept 10 to 40.",
        build: fig5,
    },
    Preset {
        name: "fig6",
        summary: "fig3 with channel state known before scheduling.",
        build: fig6,
    },
    Preset {
        name: "fig7",
        summary: "fig4 with channel state known before scheduling.",
        build: fig7,
    },
    Preset {
        name: "fig8",
        summary: "fig5 with channel state known before scheduling.",
        build: fig8,
    },
    Preset {
        name: "fig9",
        summary: "Two equal-weight sensors without CSI, p_poor = 0.1, p_good swept 0.1 to 1; \
                  channel-aware Whittle vs AoI Whittle vs max-throughput, scored on CA-AoI.",
        build: fig9,
    },
    Preset {
        name: "fig10",
        summary: "The fig9 system and policies scored on vanilla AoI.",
        build: fig10,
    },
    Preset {
        name: "fig11",
        summary: "Mixed CSI: unknown (0.1, w 1), unknown (0.9, w 1), known (0.1, w 1), known (p, w 100); p swept 0 to 1.",
        build: fig11,
    },
    Preset {
        name: "fig12",
        summary: "Mixed CSI: known (0.1, w 1), known (0.9, w 1), unknown (0.1, w 1), unknown (p, w 100); p swept 0 to 1.",
        build: fig12,
    },
];

pub fn find(name: &str) -> Option<&'static Preset> {
    PRESETS.iter().find(|p| p.name == name)
}

fn grid(from: u32, to: u32) -> Vec<f64> {
    (from..=to).map(|k| k as f64 / 10.0).collect()
}

fn sensors(list: &[(f64, f64, Csi)]) -> Vec<SensorEntry> {
    list.iter()
        .map(|&(weight, p, csi)| SensorEntry { weight, p, csi })
        .collect()
}

fn standard_policies() -> Vec<PolicyEntry> {
    [PolicyKind::Whittle, PolicyKind::Randomized, PolicyKind::Greedy]
        .into_iter()
        .map(|k| PolicyEntry::new(k, MetricKind::CaAoi))
        .collect()
}

fn base(system: Vec<SensorEntry>, sweep: Option<SweepEntry>, policies: Vec<PolicyEntry>) -> Config {
    Config {
        schema_version: SCHEMA_VERSION,
        system,
        random_system: None,
        normalize_weights: true,
        policies,
        sweep,
        horizon: caaoi::sim::DEFAULT_HORIZON,
        replications: caaoi::sim::DEFAULT_REPLICATIONS,
        seed: 1,
        output: None,
    }
}

fn sweep(path: &str, values: Vec<f64>) -> Option<SweepEntry> {
    Some(SweepEntry {
        path: path.into(),
        values,
    })
}

fn three_sensors(csi: Csi) -> Config {
    base(
        sensors(&[(1.0, 0.1, csi), (1.0, 0.9, csi), (100.0, 0.5, csi)]),
        sweep("sensors[2].p", grid(0, 10)),
        standard_policies(),
    )
}

fn two_sensors(csi: Csi) -> Config {
    base(
        sensors(&[(1000.0, 0.1, csi), (1.0, 0.5, csi)]),
        sweep("sensors[1].p", grid(1, 9)),
        standard_policies(),
    )
}

fn growing(csi: Csi) -> Config {
    let mut cfg = base(
        Vec::new(),
        sweep("n", (10..=40).step_by(5).map(f64::from).collect()),
        standard_policies(),
    );
    cfg.random_system = Some(RandomSystem { n: 10, csi });
    cfg
}

fn fig3() -> Config {
    three_sensors(Csi::Unknown)
}

fn fig4() -> Config {
    two_sensors(Csi::Unknown)
}

fn fig5() -> Config {
    growing(Csi::Unknown)
}

fn fig6() -> Config {
    three_sensors(Csi::Known)
}

fn fig7() -> Config {
    two_sensors(Csi::Known)
}

fn fig8() -> Config {
    growing(Csi::Known)
}

fn tradeoff(metric: MetricKind) -> Config {
    base(
        sensors(&[(1.0, 0.1, Csi::Unknown), (1.0, 0.5, Csi::Unknown)]),
        sweep("sensors[1].p", grid(1, 10)),
        vec![
            PolicyEntry::new(PolicyKind::Whittle, metric).targeting(MetricKind::CaAoi),
            PolicyEntry::new(PolicyKind::Whittle, metric).targeting(MetricKind::VanillaAoi),
            PolicyEntry::new(PolicyKind::MaxThroughput, metric),
        ],
    )
}

fn fig9() -> Config {
    tradeoff(MetricKind::CaAoi)
}

fn fig10() -> Config {
    tradeoff(MetricKind::VanillaAoi)
}

fn fig11() -> Config {
    base(
        sensors(&[
            (1.0, 0.1, Csi::Unknown),
            (1.0, 0.9, Csi::Unknown),
            (1.0, 0.1, Csi::Known),
            (100.0, 0.5, Csi::Known),
        ]),
        sweep("sensors[3].p", grid(0, 10)),
        standard_policies(),
    )
}

fn fig12() -> Config {
    base(
        sensors(&[
            (1.0, 0.1, Csi::Known),
            (1.0, 0.9, Csi::Known),
            (1.0, 0.1, Csi::Unknown),
            (100.0, 0.5, Csi::Unknown),
        ]),
        sweep("sensors[3].p", grid(0, 10)),
        standard_policies(),
    )
}

/// Text shown by `describe`.
pub fn describe(preset: &Preset) -> String {
    let cfg = (preset.build)();
    let mut out = format!("{}\n  {}\n", preset.name, preset.summary);
    if let Some(r) = &cfg.random_system {
        out += &format!("  system: random, csi {}\n", csi_name(r.csi));
    } else {
        out += "  system (weight, p, csi):\n";
        for (i, s) in cfg.system.iter().enumerate() {
            out += &format!("    [{i}] {}, {}, {}\n", s.weight, s.p, csi_name(s.csi));
        }
    }
    out += &format!("  weights normalized: {}\n", cfg.normalize_weights);
    if let Some(s) = &cfg.sweep {
        let values: Vec<String> = s.values.iter().map(f64::to_string).collect();
        out += &format!("  sweep {}: {}\n", s.path, values.join(", "));
    }
    out += "  policies:\n";
    for p in &cfg.policies {
        let target = p.target.map(|t| format!(", tuned for {}", t.as_str())).unwrap_or_default();
        out += &format!("    {} scored on {}{}\n", p.kind.as_str(), p.metric.as_str(), target);
    }
    out += &format!(
        "  horizon {} slots, {} replications, seed {}\n",
        cfg.horizon, cfg.replications, cfg.seed
    );
    out
}

fn csi_name(csi: Csi) -> &'static str {
    match csi {
        Csi::Known => "known",
        Csi::Unknown => "unknown",
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_preset_validates() {
        for p in &PRESETS {
            let cfg = (p.build)();
            cfg.validate().unwrap_or_else(|e| panic!("{}: {e}", p.name));
            assert!(describe(p).starts_with(p.name));
        }
    }

    #[test]
    fn fig3_shape() {
        let cfg = fig3();
        assert_eq!(cfg.sweep.as_ref().unwrap().values.len(), 11);
        assert_eq!(cfg.policies.len(), 3);
        assert_eq!(cfg.system[2].weight, 100.0);
    }

    #[test]
    fn tradeoff_labels() {
        let cfg = fig10();
        assert!(cfg.policies.iter().all(|p| p.metric == MetricKind::VanillaAoi));
        assert_eq!(cfg.policies[0].target, Some(MetricKind::CaAoi));
    }
}
