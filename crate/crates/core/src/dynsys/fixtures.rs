use super::{make_system, ModelError, ModelSpec, VectorField};

/// A named model with default parameters and a search box for equilibria.
#[derive(Debug, Clone)]
pub struct Fixture {
    pub name: &'static str,
    pub summary: &'static str,
    pub states: &'static [&'static str],
    pub params: &'static [(&'static str, f64)],
    pub rhs: &'static [&'static str],
    /// Lower and upper corners; the second coordinate is ignored in 1-D.
    pub search_box: ([f64; 2], [f64; 2]),
    /// Set when the default parameters are a representative choice rather
    /// than values taken from the model's published analysis.
    pub chosen_defaults: bool,
    pub synthetic: bool,
}

const FIXTURES: &[Fixture] = &[
    Fixture {
        name: "budworm",
        summary: "spruce budworm outbreak model, logistic growth with saturating predation",
        states: &["N"],
        params: &[("R", 0.4), ("K", 15.0), ("A", 1.0), ("B", 1.0)],
        rhs: &["R*N*(1-N/K) - B*N^2/(A^2+N^2)"],
        search_box: ([-0.5, 0.0], [16.0, 0.0]),
        chosen_defaults: true,
        synthetic: false,
    },
    Fixture {
        name: "griffith",
        summary: "autocatalytic gene switch, mRNA x and protein y",
        states: &["x", "y"],
        params: &[("a", 1.0), ("b", 0.4)],
        rhs: &["-a*x + y", "x^2/(1+x^2) - b*y"],
        search_box: ([-0.5, -0.5], [4.0, 4.0]),
        chosen_defaults: true,
        synthetic: false,
    },
    Fixture {
        name: "group_defense",
        summary: "predator-prey with group defense, prey x and predator y",
        states: &["x", "y"],
        params: &[("K", 6.0)],
        rhs: &[
            "2*x*(1-x/K) - 9*x*y/(x^2+3.35*x+13.5)",
            "y*(-1 + 11.3*x/(x^2+3.35*x+13.5))",
        ],
        search_box: ([0.1, -0.5], [8.0, 6.0]),
        chosen_defaults: false,
        synthetic: false,
    },
    Fixture {
        name: "sir_treatment",
        summary: "SIR model with saturated incidence and limited treatment, reduced to (S, I)",
        states: &["S", "I"],
        params: &[
            ("Lambda", 16.0),
            ("beta", 0.005),
            ("kappa", 0.01),
            ("d", 0.1),
            ("gamma", 0.01),
            ("eps", 0.02),
            ("alpha", 6.0),
            ("omega", 7.0),
        ],
        rhs: &[
            "Lambda - beta*S*I/(1+kappa*I) - d*S",
            "beta*S*I/(1+kappa*I) - (d+gamma+eps)*I - alpha*I/(omega+I)",
        ],
        search_box: ([-0.5, -0.5], [162.0, 162.0]),
        chosen_defaults: false,
        synthetic: false,
    },
    Fixture {
        name: "competition_lv",
        summary: "two-species competition, x(3-x-2y) and y(2-x-y)",
        states: &["x", "y"],
        params: &[],
        rhs: &["x*(3-x-2*y)", "y*(2-x-y)"],
        search_box: ([-0.5, -0.5], [4.0, 3.5]),
        chosen_defaults: true,
        synthetic: false,
    },
    Fixture {
        name: "synthetic_loop",
        summary: "stable focus inside an unstable circle r=1, node and saddle on r=3",
        states: &["x", "y"],
        params: &[],
        rhs: &[
            "0.1*x*(x^2+y^2-1)*(9-x^2-y^2) - y*(1-0.5*y)",
            "0.1*y*(x^2+y^2-1)*(9-x^2-y^2) + x*(1-0.5*y)",
        ],
        search_box: ([-4.2, -4.2], [4.2, 4.2]),
        chosen_defaults: true,
        synthetic: true,
    },
    Fixture {
        name: "synthetic_ring",
        summary: "gradient flow of (r^2-1)^2 - a x^2: repeller, two saddles, two minima",
        states: &["x", "y"],
        params: &[("a", 0.5)],
        rhs: &["-4*x*(x^2+y^2-1) + 2*a*x", "-4*y*(x^2+y^2-1)"],
        search_box: ([-2.2, -2.2], [2.2, 2.2]),
        chosen_defaults: true,
        synthetic: true,
    },
];

pub fn builtin_names() -> Vec<&'static str> {
    FIXTURES.iter().map(|f| f.name).collect()
}

pub fn fixture(name: &str) -> Result<&'static Fixture, ModelError> {
    FIXTURES
        .iter()
        .find(|f| f.name == name)
        .ok_or_else(|| ModelError::UnknownModel(name.to_string()))
}

impl Fixture {
    pub fn spec(&self) -> ModelSpec {
        ModelSpec {
            name: self.name.to_string(),
            states: self.states.iter().map(|s| s.to_string()).collect(),
            params: self.params.iter().map(|(n, v)| (n.to_string(), *v)).collect(),
            rhs: self.rhs.iter().map(|s| s.to_string()).collect(),
        }
    }
}

/// Instantiate a named model with parameter overrides.
pub fn builtin(name: &str, overrides: &[(String, f64)]) -> Result<VectorField, ModelError> {
    let fx = fixture(name)?;
    let mut spec = fx.spec();
    for (k, v) in overrides {
        match spec.params.iter_mut().find(|(n, _)| n == k) {
            Some(slot) => slot.1 = *v,
            None => {
                return Err(ModelError::UnknownParameter {
                    model: name.to_string(),
                    name: k.clone(),
                })
            }
        }
    }
    make_system(spec)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn every_fixture_builds() {
        for name in builtin_names() {
            builtin(name, &[]).unwrap();
        }
    }

    #[test]
    fn griffith_fixture_values() {
        let f = builtin("griffith", &[]).unwrap();
        assert_eq!(f.eval(&[0.0, 0.0]).unwrap(), [0.0, 0.0]);
        for p in [[0.5, 0.5], [2.0, 2.0]] {
            let v = f.eval(&p).unwrap();
            assert!(v[0].abs() < 1e-12 && v[1].abs() < 1e-12);
        }
        assert_eq!(f.jacobian(&[0.0, 0.0]).unwrap(), vec![vec![-1.0, 1.0], vec![0.0, -0.4]]);
        let j = f.jacobian(&[2.0, 2.0]).unwrap();
        assert!((j[1][0] - 0.16).abs() < 1e-15);
    }

    #[test]
    fn budworm_linearization_at_zero() {
        let f = builtin("budworm", &[]).unwrap();
        assert_eq!(f.dim(), 1);
        assert_eq!(f.eval(&[0.0, 0.0]).unwrap()[0], 0.0);
        assert_eq!(f.jacobian(&[0.0, 0.0]).unwrap(), vec![vec![0.4]]);
    }

    #[test]
    fn overrides_and_unknowns() {
        let f = builtin("group_defense", &[("K".into(), 4.0)]).unwrap();
        assert_eq!(f.param("K"), Some(4.0));
        let sir = builtin("sir_treatment", &[]).unwrap();
        assert_eq!(sir.param("Lambda"), Some(16.0));
        assert_eq!(sir.param("omega"), Some(7.0));
        assert_eq!(
            builtin("lorenz", &[]).unwrap_err(),
            ModelError::UnknownModel("lorenz".into())
        );
        assert!(matches!(
            builtin("griffith", &[("q".into(), 1.0)]),
            Err(ModelError::UnknownParameter { .. })
        ));
    }

    #[test]
    fn analytic_jacobians_match_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for name in builtin_names() {
            let fx = fixture(name).unwrap();
            let f = builtin(name, &[]).unwrap();
            let (lo, hi) = fx.search_box;
            for _ in 0..50 {
                let mut p = [0.0; 2];
                for k in 0..f.dim() {
                    // stay off the boundary of the box and off zero-denominators
                    p[k] = rng.gen_range(lo[k].max(0.05)..hi[k]);
                }
                let a = f.jacobian2(&p).unwrap();
                let d = f.jacobian_fd(&p).unwrap();
                let scale = a.iter().flatten().fold(1.0f64, |m, v| m.max(v.abs()));
                for i in 0..f.dim() {
                    for j in 0..f.dim() {
                        assert!(
                            (a[i][j] - d[i][j]).abs() <= 1e-5 * scale,
                            "{name} at {p:?}: {a:?} vs {d:?}"
                        );
                    }
                }
            }
        }
    }
}
