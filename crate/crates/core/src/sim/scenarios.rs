//! Built-in scenario catalog.

use crate::controllers::ControllerConfig;
use crate::lfp::ConstrainedLfpInstance;
use crate::model::{
    build_task_model, ActionMeans, AttributeModel, AttributeSpec, EventSpec, Noise, NoiseTable, NullClassSpec, TaskSpec,
};

use super::{ControllerKind, RateChange, Scenario, ScenarioModel, DEFAULT_HORIZON};

/// Default number of points for discretized continuous actions.
pub const DEFAULT_GRID: usize = 101;

pub fn one_class_spec(rate: f64) -> TaskSpec {
    TaskSpec {
        mean_energy: vec![vec![1.0, 3.0]],
        mean_duration: vec![vec![7.0, 4.0]],
        idle_max: 10.0,
        duration_min: None,
        rates: vec![rate],
        modes: vec![],
        noise: NoiseTable::default(),
        null_class: None,
        idle_power: 0.0,
    }
}

/// Ten classes: `ê(i,·) = (i, 2i)`, `D̂(i,·) = (5i, 3i)`, `λ_i = ρ/(30 i)`.
pub fn ten_class_spec(rho: f64) -> TaskSpec {
    TaskSpec {
        mean_energy: (1..=10).map(|i| vec![i as f64, 2.0 * i as f64]).collect(),
        mean_duration: (1..=10).map(|i| vec![5.0 * i as f64, 3.0 * i as f64]).collect(),
        idle_max: 10.0,
        duration_min: None,
        rates: (1..=10).map(|i| rho / (30.0 * i as f64)).collect(),
        modes: vec![],
        noise: NoiseTable::default(),
        null_class: None,
        idle_power: 0.0,
    }
}

fn task(name: &str, spec: TaskSpec, kind: ControllerKind) -> Scenario {
    let model = build_task_model(&spec).expect("built-in spec is valid");
    Scenario::new(name, ScenarioModel::Task(model), kind)
}

fn flow_config(v: f64) -> ControllerConfig {
    ControllerConfig {
        weights: vec![1.0; 10],
        power_budget: Some(0.5),
        ..ControllerConfig::with_v(v)
    }
}

fn attribute(name: &str, spec: AttributeSpec, kind: ControllerKind) -> Scenario {
    let model = AttributeModel::new(spec).expect("built-in spec is valid");
    Scenario::new(name, ScenarioModel::Attribute(model), kind)
}

fn grid(max: f64, points: usize) -> impl Iterator<Item = f64> {
    let steps = points.max(2) - 1;
    (0..=steps).map(move |i| max * i as f64 / steps as f64)
}

/// Unit slots, events `(A, S)`, power `p` on a grid over `[0, 4]`;
/// `y_0 = p`, `y_1 = A - log2(1 + S p)`.
pub fn opportunistic_spec(points: usize) -> AttributeSpec {
    let arrivals = [(0.0, 0.3), (1.0, 0.4), (2.0, 0.3)];
    let channels = [(0.5, 0.3), (1.0, 0.4), (2.0, 0.3)];
    let mut events = Vec::new();
    for &(a, pa) in &arrivals {
        for &(s, ps) in &channels {
            let actions = grid(4.0, points)
                .map(|p| ActionMeans {
                    label: format!("p={p}"),
                    frame: 1.0,
                    attributes: vec![p, a - (1.0 + s * p).log2()],
                })
                .collect();
            events.push(EventSpec {
                label: format!("A={a},S={s}"),
                probability: pa * ps,
                actions,
            });
        }
    }
    AttributeSpec {
        events,
        bounds: vec![0.0],
    }
}

/// Service function of the outsourcing example.
pub fn energy_service(e: f64) -> f64 {
    (1.0 + 2.0 * e).log2()
}

/// Unit slots, events `(S, φ, ψ)`, actions `(γ, e)` with `γ = 1` listed first
/// and `e` on a grid over `[0, 2]`; `y_0 = φ (1-γ) S + ψ e`, `y_1 = γ S - μ̂(e)`.
pub fn energy_price_spec(points: usize) -> AttributeSpec {
    let sizes = [(0.0, 0.2), (1.0, 0.5), (2.0, 0.3)];
    let out_prices = [(1.0, 0.5), (3.0, 0.5)];
    let energy_prices = [(0.5, 0.5), (2.0, 0.5)];
    let mut events = Vec::new();
    for &(s, p1) in &sizes {
        for &(phi, p2) in &out_prices {
            for &(psi, p3) in &energy_prices {
                let mut actions = Vec::new();
                for gamma in [1.0, 0.0] {
                    for e in grid(2.0, points) {
                        actions.push(ActionMeans {
                            label: format!("gamma={gamma},e={e}"),
                            frame: 1.0,
                            attributes: vec![phi * (1.0 - gamma) * s + psi * e, gamma * s - energy_service(e)],
                        });
                    }
                }
                events.push(EventSpec {
                    label: format!("S={s},phi={phi},psi={psi}"),
                    probability: p1 * p2 * p3,
                    actions,
                });
            }
        }
    }
    AttributeSpec {
        events,
        bounds: vec![0.0],
    }
}

/// `(D_comp, e_comp, quality, expected bits)`.
type ComputeMode = (f64, f64, f64, f64);

/// Computation and transmission device. Events are (meta-data type, channel);
/// actions are (computation mode, transmission mode). Attributes are
/// `y_0 = -q`, `y_1 = T - 1/λ`, `y_2 = e_comp + e_tran - P_av T`.
pub fn smart_device_spec(rate_target: f64, power_budget: f64) -> AttributeSpec {
    let d = 0.5;
    let meta: [(&str, f64, Vec<ComputeMode>); 2] = [
        (
            "beta1",
            0.6,
            vec![(1.0, 1.0, 1.0, 2.0), (2.0, 0.5, 1.5, 1.0), (0.5, 2.0, 0.8, 3.0)],
        ),
        ("beta2", 0.4, vec![(2.0, 2.0, 2.0, 3.0), (3.0, 1.0, 2.5, 2.0)]),
    ];
    let channels = [("good", 2.0, 0.5), ("bad", 0.5, 0.5)];
    // (label, bits per unit time per unit channel, transmit power)
    let tx = [("fast", 2.0, 2.0), ("slow", 1.0, 0.5)];
    let mut events = Vec::new();
    for (beta, pb, modes) in &meta {
        for &(ch, s, ps) in &channels {
            let mut actions = Vec::new();
            for (m, &(dc, ec, q, bits)) in modes.iter().enumerate() {
                for &(g, r, p) in &tx {
                    let dt = bits / (s * r);
                    let et = p * dt;
                    let t = d + dc + dt;
                    actions.push(ActionMeans {
                        label: format!("m={},g={g}", m + 1),
                        frame: t,
                        attributes: vec![-q, t - 1.0 / rate_target, ec + et - power_budget * t],
                    });
                }
            }
            events.push(EventSpec {
                label: format!("{beta},{ch}"),
                probability: pb * ps,
                actions,
            });
        }
    }
    AttributeSpec {
        events,
        bounds: vec![0.0, 0.0],
    }
}

pub fn online_lfp_instance() -> ConstrainedLfpInstance {
    ConstrainedLfpInstance {
        a: vec![1.0, 2.0, -1.0, 0.5],
        b: vec![2.0, 1.0, 0.5, 1.0],
        constraints: vec![vec![1.0, 1.0, 1.0], vec![-4.0, 0.0, 0.0]],
        bounds: vec![1.5, -1.2],
    }
}

pub fn builtin_scenarios() -> Vec<Scenario> {
    let third = DEFAULT_HORIZON / 3;
    let mut noisy = ten_class_spec(0.8);
    noisy.noise = NoiseTable::Uniform(Noise::Uniform { width: 1.0 });
    let mut null_class = ten_class_spec(0.8);
    null_class.null_class = Some(NullClassSpec::default());
    vec![
        task("one_class", one_class_spec(0.2), ControllerKind::TaskScheduler)
            .with_description("one class, two modes, rate constraint 0.2"),
        task(
            "one_class_unconstrained",
            one_class_spec(0.0),
            ControllerKind::TaskScheduler,
        )
        .with_description("one class, two modes, no rate constraint"),
        task("ten_class", ten_class_spec(0.8), ControllerKind::TaskScheduler)
            .with_description("ten classes, two modes, rates 0.8/(30 i)"),
        task("ten_class_noisy", noisy, ControllerKind::TaskScheduler)
            .with_description("ten_class with uniform outcome noise of half-width 1"),
        task(
            "flow_control_ten_class",
            ten_class_spec(0.8),
            ControllerKind::FlowControl,
        )
        .with_config(flow_config(100.0))
        .with_description("admission control and scheduling, unit weights, power budget 0.5"),
        task("flow_control_null_class", null_class, ControllerKind::FlowControl)
            .with_config(flow_config(100.0))
            .with_description("flow control with a zero-energy null class"),
        task("rate_switch", ten_class_spec(0.8), ControllerKind::FlowControl)
            .with_config(flow_config(100.0))
            .with_rate_schedule(vec![
                RateChange {
                    start_frame: 0,
                    multiplier: 1.0,
                },
                RateChange {
                    start_frame: third,
                    multiplier: 2.0,
                },
                RateChange {
                    start_frame: 2 * third,
                    multiplier: 1.0,
                },
            ])
            .with_description("flow control with load 0.8, 1.6, 0.8 over three equal phases"),
        attribute(
            "opportunistic",
            opportunistic_spec(DEFAULT_GRID),
            ControllerKind::FixedFrame,
        )
        .with_description("unit slots, random arrivals and channels, power grid over [0, 4]"),
        attribute(
            "energy_price",
            energy_price_spec(DEFAULT_GRID),
            ControllerKind::FixedFrame,
        )
        .with_description("accept or outsource tasks and buy energy at random prices"),
        attribute("smart_device", smart_device_spec(0.2, 1.2), ControllerKind::Algorithm2)
            .with_config(ControllerConfig {
                power_budget: Some(1.2),
                rate_target: Some(0.2),
                ..ControllerConfig::with_v(10.0)
            })
            .with_description("joint computation and transmission choices under rate and power limits"),
        Scenario::new(
            "online_lfp",
            ScenarioModel::Lfp(online_lfp_instance()),
            ControllerKind::OnlineLfp,
        )
        .with_v(1000.0)
        .with_description("online ratio rule over a constrained linear fractional program"),
    ]
}

pub fn builtin_scenario(name: &str) -> Option<Scenario> {
    builtin_scenarios().into_iter().find(|s| s.name == name)
}

pub fn scenario_names() -> Vec<String> {
    builtin_scenarios().into_iter().map(|s| s.name).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn catalog_is_valid() {
        let names = scenario_names();
        for required in [
            "one_class",
            "one_class_unconstrained",
            "ten_class",
            "flow_control_ten_class",
            "rate_switch",
            "opportunistic",
            "energy_price",
            "smart_device",
            "online_lfp",
        ] {
            assert!(names.iter().any(|n| n == required), "missing {required}");
        }
        for s in builtin_scenarios() {
            s.validate().unwrap_or_else(|e| panic!("{}: {e}", s.name));
        }
    }

    #[test]
    fn smart_device_transform_matches_definition() {
        let spec = smart_device_spec(0.2, 1.2);
        for e in &spec.events {
            for a in &e.actions {
                assert!((a.attributes[1] - (a.frame - 5.0)).abs() < 1e-12);
            }
        }
    }
}
