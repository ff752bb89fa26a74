//! Periodic orbits from a return map on a horizontal ray.

use super::{FlowConfig, FlowError};
use crate::conley::{cycle_stability, index_of_planar_cycle, ConleyError, ConleyIndex, CycleStability};
use crate::dynsys::{State, VectorField};
use crate::equilibria::{scale, EqClass, Equilibrium};
use crate::integrator::{integrate, Crossing, EventSpec, Options, Termination};
use crate::linalg::dist;
use crate::region::{point_in_polygon, Region};
use serde::Serialize;

/// Points kept along one period.
const CYCLE_POINTS: usize = 400;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Cycle {
    /// One period in forward time order; the last point joins the first.
    pub points: Vec<State>,
    pub period: f64,
    /// Equilibrium the section ray starts from.
    pub center: State,
    /// Where the cycle crosses the ray, measured from `center`.
    pub section_radius: f64,
    /// Distance between the start and the point one period later.
    pub closure: f64,
    /// Forward-time return-map derivative.
    pub multiplier: f64,
    /// Same derivative with half the difference step.
    pub multiplier_half: f64,
    pub stability: CycleStability,
}

impl Cycle {
    /// Even-odd test against the sampled orbit.
    pub fn contains(&self, p: &State) -> bool {
        point_in_polygon(&self.points, p)
    }

    pub fn index(&self) -> Result<ConleyIndex, ConleyError> {
        index_of_planar_cycle(self.multiplier)
    }
}

struct ReturnMap<'a> {
    field: &'a VectorField,
    center: State,
    /// +1 forward, -1 backward.
    sign: f64,
    /// +1 when orbits cross the ray upward.
    rot: f64,
    max_radius: f64,
    region: Option<&'a Region>,
    stops: Vec<State>,
    t_max: f64,
    tol: f64,
}

struct Return {
    radius: f64,
    time: f64,
}

impl ReturnMap<'_> {
    fn start(&self, r: f64) -> State {
        [self.center[0] + r, self.center[1]]
    }

    fn orbit(&self, r: f64) -> Option<Return> {
        let start = self.start(r);
        if let Some(reg) = self.region {
            if !reg.contains(&start) {
                return None;
            }
        }
        let f = self.field.eval(&start).ok()?;
        if f[1] * self.sign * self.rot <= 0.0 {
            return None;
        }
        let cy = self.center[1];
        let c = self.center;
        let dir = if self.rot > 0.0 {
            Crossing::Rising
        } else {
            Crossing::Falling
        };
        let mut events = vec![
            EventSpec::new(0, dir, true, move |p: &State| p[1] - cy),
            EventSpec::new(1, Crossing::Rising, true, move |p: &State| {
                dist(p, &c) - self.max_radius
            }),
        ];
        if let Some(reg) = self.region {
            events.push(reg.exit_event(2));
        }
        for (k, s) in self.stops.iter().enumerate() {
            let s = *s;
            let radius = 1e-4 * scale(&s);
            events.push(EventSpec::new(3 + k, Crossing::Falling, true, move |p: &State| {
                dist(p, &s) - radius
            }));
        }
        let opts = Options::with_tol(self.tol).endpoints_only();
        let tr = integrate(self.field, start, (0.0, self.sign * self.t_max), &opts, &events).ok()?;
        if tr.termination != Termination::Event(0) {
            return None;
        }
        let p = tr.final_state();
        (p[0] > c[0]).then(|| Return {
            radius: p[0] - c[0],
            time: tr.final_time().abs(),
        })
    }

    fn displacement(&self, r: f64) -> Option<f64> {
        self.orbit(r).map(|ret| ret.radius - r)
    }

    fn derivative(&self, r: f64, h: f64) -> Option<f64> {
        let hi = self.orbit(r + h)?.radius;
        let lo = self.orbit(r - h)?.radius;
        Some((hi - lo) / (2.0 * h))
    }

    /// Illinois-modified regula falsi on a sign-changing bracket.
    fn refine(&self, mut a: f64, mut da: f64, mut b: f64, mut db: f64) -> Result<f64, FlowError> {
        for _ in 0..50 {
            let mut c = b - db * (b - a) / (db - da);
            if !(c > a.min(b) && c < a.max(b)) {
                c = 0.5 * (a + b);
            }
            let dc = match self.displacement(c) {
                Some(d) => d,
                None => {
                    c = 0.5 * (a + b);
                    self.displacement(c).ok_or(FlowError::SecantDiverged { r: c })?
                }
            };
            if dc.abs() < 1e-9 || (b - a).abs() < 1e-13 * c {
                return Ok(c);
            }
            if (dc > 0.0) == (db > 0.0) {
                b = c;
                db = dc;
                da *= 0.5;
            } else {
                a = b;
                da = db;
                b = c;
                db = dc;
            }
        }
        Err(FlowError::SecantDiverged { r: b })
    }

    /// Sample one period starting on the ray, in forward time order.
    fn sample(&self, r: f64, period: f64) -> (Vec<State>, f64) {
        let opts = Options::with_tol(self.tol).endpoints_only();
        let dt = self.sign * period / CYCLE_POINTS as f64;
        let mut pts = vec![self.start(r)];
        let mut x = pts[0];
        for k in 1..=CYCLE_POINTS {
            match integrate(self.field, x, (0.0, dt), &opts, &[]) {
                Ok(tr) => x = tr.final_state(),
                Err(_) => return (pts, f64::INFINITY),
            }
            if k < CYCLE_POINTS {
                pts.push(x);
            }
        }
        let gap = dist(&x, &pts[0]);
        if self.sign < 0.0 {
            pts.reverse();
        }
        (pts, gap)
    }
}

/// Attracting or repelling cycle around an unstable focus or node, found by
/// following orbits forward from the horizontal ray through `seed`.
pub fn find_limit_cycle(
    field: &VectorField,
    seed: &Equilibrium,
    max_radius: f64,
    region: Option<&Region>,
    stops: &[State],
    cfg: &FlowConfig,
) -> Result<Option<Cycle>, FlowError> {
    match seed.class {
        EqClass::UnstableFocus | EqClass::UnstableNode => {
            search(field, seed, 1.0, max_radius, region, stops, cfg)
        }
        other => Err(FlowError::BadSeed(other.name())),
    }
}

/// Same search in backward time around a stable focus or node; this finds
/// the unstable cycles that separate basins.
pub fn find_repelling_cycle(
    field: &VectorField,
    seed: &Equilibrium,
    max_radius: f64,
    region: Option<&Region>,
    stops: &[State],
    cfg: &FlowConfig,
) -> Result<Option<Cycle>, FlowError> {
    match seed.class {
        EqClass::StableFocus | EqClass::StableNode => {
            search(field, seed, -1.0, max_radius, region, stops, cfg)
        }
        other => Err(FlowError::BadSeed(other.name())),
    }
}

fn search(
    field: &VectorField,
    seed: &Equilibrium,
    sign: f64,
    max_radius: f64,
    region: Option<&Region>,
    stops: &[State],
    cfg: &FlowConfig,
) -> Result<Option<Cycle>, FlowError> {
    if field.dim() != 2 || !(max_radius > 0.0) {
        return Ok(None);
    }
    // rotation sense on the ray right next to the seed
    let turn = seed.jacobian[1][0] * sign;
    if turn == 0.0 {
        return Ok(None);
    }
    let map = ReturnMap {
        field,
        center: seed.point,
        sign,
        rot: turn.signum(),
        max_radius,
        region,
        stops: stops
            .iter()
            .copied()
            .filter(|s| dist(s, &seed.point) > 1e-9 * scale(s))
            .collect(),
        t_max: cfg.t_max,
        tol: cfg.tol.min(1e-11),
    };
    let n = cfg.cycle_scan.max(2);
    let r_min = 1e-3 * max_radius;
    let r_max = 0.98 * max_radius;
    let radii: Vec<f64> = (0..n)
        .map(|k| r_min * (r_max / r_min).powf(k as f64 / (n - 1) as f64))
        .collect();
    let mut prev: Option<(f64, f64)> = None;
    let mut bracket = None;
    for &r in &radii {
        let d = map.displacement(r);
        if let (Some((ra, da)), Some(db)) = (prev, d) {
            if da == 0.0 {
                bracket = Some((ra, da, ra, da));
                break;
            }
            if (da > 0.0) != (db > 0.0) {
                bracket = Some((ra, da, r, db));
                break;
            }
        }
        prev = d.map(|d| (r, d));
    }
    let Some((a, da, b, db)) = bracket else {
        return Ok(None);
    };
    let r_star = if a == b { a } else { map.refine(a, da, b, db)? };
    let ret = map.orbit(r_star).ok_or(FlowError::SecantDiverged { r: r_star })?;
    let h = 1e-4 * r_star;
    let m1 = map.derivative(r_star, h).ok_or(FlowError::SecantDiverged { r: r_star })?;
    let m2 = map.derivative(r_star, 0.5 * h).ok_or(FlowError::SecantDiverged { r: r_star })?;
    let (m1, m2) = if sign < 0.0 { (1.0 / m1, 1.0 / m2) } else { (m1, m2) };
    let stability = cycle_stability(m1)?;
    let (points, closure) = map.sample(r_star, ret.time);
    Ok(Some(Cycle {
        points,
        closure,
        period: ret.time,
        center: seed.point,
        section_radius: r_star,
        multiplier: m1,
        multiplier_half: m2,
        stability,
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynsys::{builtin, make_system, ModelSpec};
    use crate::equilibria::classify;

    fn field(f: &str, g: &str) -> VectorField {
        make_system(ModelSpec {
            name: "t".into(),
            states: vec!["x".into(), "y".into()],
            params: vec![],
            rhs: vec![f.into(), g.into()],
        })
        .unwrap()
    }

    #[test]
    fn hopf_normal_form_cycle() {
        // r' = r(1 - r^2): unit circle, multiplier exp(-4π)
        let f = field("x - y - x*(x^2+y^2)", "x + y - y*(x^2+y^2)");
        let seed = classify(&f, [0.0, 0.0]).unwrap();
        let c = find_limit_cycle(&f, &seed, 3.0, None, &[], &FlowConfig::default())
            .unwrap()
            .unwrap();
        assert!((c.section_radius - 1.0).abs() < 1e-8);
        assert!((c.period - std::f64::consts::TAU).abs() < 1e-6);
        let expect = (-4.0 * std::f64::consts::PI).exp();
        assert!((c.multiplier - expect).abs() < 1e-6);
        assert_eq!(c.stability, CycleStability::Stable);
        assert!(c.contains(&[0.1, 0.2]));
        assert!(!c.contains(&[1.5, 0.0]));
        assert!(c.closure < 1e-6);
    }

    #[test]
    fn repelling_cycle_backward() {
        let f = field("-x - y + x*(x^2+y^2)", "x - y + y*(x^2+y^2)");
        let seed = classify(&f, [0.0, 0.0]).unwrap();
        let c = find_repelling_cycle(&f, &seed, 3.0, None, &[], &FlowConfig::default())
            .unwrap()
            .unwrap();
        assert!((c.section_radius - 1.0).abs() < 1e-8);
        assert_eq!(c.stability, CycleStability::Unstable);
        assert!(c.multiplier > 1.0);
    }

    #[test]
    fn no_cycles() {
        let f = field("x - y", "x + y");
        let seed = classify(&f, [0.0, 0.0]).unwrap();
        assert!(find_limit_cycle(&f, &seed, 5.0, None, &[], &FlowConfig::default())
            .unwrap()
            .is_none());
        let g = builtin("griffith", &[]).unwrap();
        let node = classify(&g, [2.0, 2.0]).unwrap();
        assert!(matches!(
            find_limit_cycle(&g, &node, 2.0, None, &[], &FlowConfig::default()),
            Err(FlowError::BadSeed(_))
        ));
        assert!(find_repelling_cycle(&g, &node, 2.0, None, &[], &FlowConfig::default())
            .unwrap()
            .is_none());
    }
}
