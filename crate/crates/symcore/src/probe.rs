//! Randomized evaluation oracle for the zero test.
//!
//! Every atom, including function and logarithm atoms, gets an independent
//! random rational value. A value claimed identically zero must vanish at
//! every probed point; a value claimed nonzero must be nonzero at one of
//! them.

use std::cell::RefCell;
use std::collections::HashMap;

use num_traits::Zero;
use rand::rngs::StdRng;
use rand::SeedableRng;

use crate::atom::Var;
use crate::point::{random_q, Value};
use crate::poly::{rational_sqrt, Q};
use crate::scalar::Scalar;

/// Environment variable overriding the number of probe points.
pub const PROBES_ENV: &str = "PENCIL_FORGE_PROBES";

const DEFAULT_PROBES: usize = 100;

/// Probe points per check, from [`PROBES_ENV`] or 100.
pub fn probe_count() -> usize {
    std::env::var(PROBES_ENV)
        .ok()
        .and_then(|s| s.trim().parse().ok())
        .unwrap_or(DEFAULT_PROBES)
}

/// A point where the evaluation disagrees with the symbolic verdict.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Disagreement {
    pub expression: String,
    pub claimed_zero: bool,
    pub point: Vec<(String, String)>,
}

/// Arithmetic step that produced a value.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Op {
    Add,
    Sub,
    Mul,
    Div,
}

/// A value whose zero test was decided, with the step that produced it when
/// that step happened while recording.
#[derive(Clone, Debug)]
pub struct Recorded {
    pub value: Scalar,
    pub origin: Option<(Op, Scalar, Scalar)>,
}

#[derive(Default)]
struct Recorder {
    decided: Vec<Recorded>,
    /// Keyed by the address of the result; the stored clone keeps it unique.
    origins: HashMap<usize, (Op, Scalar, Scalar, Scalar)>,
}

thread_local! {
    static RECORDER: RefCell<Option<Recorder>> = const { RefCell::new(None) };
}

pub(crate) fn record(e: &Scalar) {
    RECORDER.with(|r| {
        if let Some(rec) = r.borrow_mut().as_mut() {
            let origin = rec
                .origins
                .get(&e.addr())
                .map(|(op, a, b, _)| (*op, a.clone(), b.clone()));
            rec.decided.push(Recorded { value: e.clone(), origin });
        }
    });
}

pub(crate) fn note(op: Op, lhs: &Scalar, rhs: &Scalar, out: &Scalar) {
    RECORDER.with(|r| {
        if let Some(rec) = r.borrow_mut().as_mut() {
            let key = out.addr();
            if key != lhs.addr() && key != rhs.addr() {
                rec.origins.insert(key, (op, lhs.clone(), rhs.clone(), out.clone()));
            }
        }
    });
}

/// Run `f`, collecting every value whose zero test was decided on this
/// thread.
pub fn recording<T>(f: impl FnOnce() -> T) -> (T, Vec<Recorded>) {
    let previous = RECORDER.with(|r| r.borrow_mut().replace(Recorder::default()));
    let out = f();
    let recorded = RECORDER.with(|r| {
        let mut r = r.borrow_mut();
        let mine = r.take().map(|rec| rec.decided).unwrap_or_default();
        *r = previous;
        mine
    });
    (out, recorded)
}

/// Evaluate at a random point; `None` on a pole.
fn value_is_zero(e: &Scalar, point: &HashMap<Var, Q>) -> Option<bool> {
    let mut lookup = |v: Var| point[&v].clone();
    let (a, b, s) = e.eval_parts(&mut lookup)?;
    if b.is_zero() {
        return Some(a.is_zero());
    }
    Some(match rational_sqrt(&s) {
        Some(r) => (a + b * r).is_zero(),
        None => false,
    })
}

/// Compare the symbolic verdict for `e` against `probes` random points.
pub fn cross_check(e: &Scalar, probes: usize, seed: u64) -> Result<(), Disagreement> {
    let Ok(claimed_zero) = e.is_structurally_zero_checked() else {
        return Ok(());
    };
    let vars: Vec<Var> = e.vars().into_iter().collect();
    let mut rng = StdRng::seed_from_u64(seed);
    let mut saw_nonzero = false;
    let mut last_point = Vec::new();
    let mut evaluated = 0;
    let mut attempts = 0;
    while evaluated < probes && attempts < probes * 4 {
        attempts += 1;
        let point: HashMap<Var, Q> = vars.iter().map(|&v| (v, random_q(&mut rng))).collect();
        let Some(z) = value_is_zero(e, &point) else {
            continue;
        };
        evaluated += 1;
        let shown: Vec<(String, String)> = vars
            .iter()
            .map(|v| (v.label().to_string(), point[v].to_string()))
            .collect();
        if claimed_zero && !z {
            return Err(Disagreement {
                expression: e.to_string(),
                claimed_zero,
                point: shown,
            });
        }
        if !z {
            saw_nonzero = true;
            break;
        }
        last_point = shown;
    }
    if !claimed_zero && !saw_nonzero && evaluated > 0 {
        return Err(Disagreement {
            expression: e.to_string(),
            claimed_zero,
            point: last_point,
        });
    }
    Ok(())
}

impl Scalar {
    fn is_structurally_zero_checked(&self) -> Result<bool, ()> {
        if self.error().is_some() {
            return Err(());
        }
        Ok(self.is_structurally_zero())
    }
}

fn combine(op: Op, x: &Value, y: &Value) -> Value {
    match op {
        Op::Add => x + y,
        Op::Sub => x - y,
        Op::Mul => x * y,
        Op::Div => x / y,
    }
}

/// Like [`cross_check`], but when the producing step is known the operands
/// are evaluated separately and combined at each point, so the verdict is
/// compared against arithmetic that bypasses normalization of the result.
pub fn cross_check_recorded(r: &Recorded, probes: usize, seed: u64) -> Result<(), Disagreement> {
    cross_check(&r.value, probes, seed)?;
    let Some((op, lhs, rhs)) = &r.origin else {
        return Ok(());
    };
    let Ok(claimed_zero) = r.value.is_structurally_zero_checked() else {
        return Ok(());
    };
    let mut vars = lhs.vars();
    vars.extend(rhs.vars());
    vars.extend(r.value.vars());
    let vars: Vec<Var> = vars.into_iter().collect();
    let mut rng = StdRng::seed_from_u64(seed ^ 0x9e37_79b9_7f4a_7c15);
    let mut saw_nonzero = false;
    let mut evaluated = 0;
    let mut attempts = 0;
    let mut last_point = Vec::new();
    while evaluated < probes && attempts < probes * 4 {
        attempts += 1;
        let point: HashMap<Var, Q> = vars.iter().map(|&v| (v, random_q(&mut rng))).collect();
        let at = |e: &Scalar| {
            let mut lookup = |v: Var| point[&v].clone();
            match e.eval_parts(&mut lookup) {
                Some((a, b, s)) => Value::surd(a, b, s),
                None => Value::undefined(),
            }
        };
        // the result itself must be finite here, or the step has a pole
        if !at(&r.value).is_defined() {
            continue;
        }
        let z = combine(*op, &at(lhs), &at(rhs));
        let Some(z_zero) = z.is_zero() else {
            continue;
        };
        evaluated += 1;
        last_point = vars
            .iter()
            .map(|v| (v.label().to_string(), point[v].to_string()))
            .collect();
        if claimed_zero && !z_zero {
            return Err(Disagreement {
                expression: format!("({lhs}) {op:?} ({rhs})"),
                claimed_zero,
                point: last_point,
            });
        }
        if !z_zero {
            saw_nonzero = true;
            break;
        }
    }
    if !claimed_zero && !saw_nonzero && evaluated > 0 {
        return Err(Disagreement {
            expression: format!("({lhs}) {op:?} ({rhs})"),
            claimed_zero,
            point: last_point,
        });
    }
    Ok(())
}
