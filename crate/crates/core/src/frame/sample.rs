//! Seeded samples of measurement sets.

use rand::Rng;

use crate::error::{Error, Result};
use crate::measurement::{d_e, t_e, t_ee, Measurement, MeasurementSetTag};
use crate::operator::{is_effect, Effect};
use crate::random::{random_qubit_effect, random_qubit_projector, seeded};
use crate::tolerance::VALIDATION_TOL;

/// Number of independently drawn effects in a three-outcome sample; every
/// further effect is a midpoint of earlier ones.
const ANCHORS: usize = 3;
const MAX_REJECTIONS: usize = 100_000;

/// `K` binary measurements `⟦P, 1 - P⟧` with uniformly random rank-1 `P`.
pub fn sample_pvm(seed: u64, k: usize) -> Vec<Measurement> {
    let mut rng = seeded(seed);
    (0..k).map(|_| d_e(random_qubit_projector(&mut rng).effect())).collect()
}

/// `K` measurements `D_e` with uniformly random qubit effects.
pub fn sample_two_outcome(seed: u64, k: usize) -> Vec<Measurement> {
    let mut rng = seeded(seed);
    (0..k).map(|_| d_e(&random_qubit_effect(&mut rng))).collect()
}

fn sum_is_effect(a: &Effect, b: &Effect) -> bool {
    is_effect(&(a.op() + b.op()), VALIDATION_TOL)
}

/// Draws qubit effects `e` whose sums `e + e'` with themselves and with every
/// earlier pick are effects, so that any two points of their convex hull can
/// be paired in a three-outcome measurement.
fn draw_anchors<R: Rng + ?Sized>(rng: &mut R, count: usize) -> Result<Vec<Effect>> {
    let mut anchors: Vec<Effect> = Vec::with_capacity(count);
    let mut rejections = 0;
    while anchors.len() < count {
        let e = random_qubit_effect(rng);
        if sum_is_effect(&e, &e) && anchors.iter().all(|a| sum_is_effect(a, &e)) {
            anchors.push(e);
        } else {
            rejections += 1;
            if rejections > MAX_REJECTIONS {
                return Err(Error::InvalidInput("could not draw compatible effects".into()));
            }
        }
    }
    Ok(anchors)
}

fn random_pair<R: Rng + ?Sized>(rng: &mut R, pool: &[Effect]) -> Result<(usize, usize)> {
    for _ in 0..MAX_REJECTIONS {
        let i = rng.random_range(0..pool.len());
        let j = rng.random_range(0..pool.len());
        if i != j && sum_is_effect(&pool[i], &pool[j]) {
            return Ok((i.min(j), i.max(j)));
        }
    }
    Err(Error::InvalidInput("no pair of effects with an effect sum".into()))
}

/// `n_two` measurements `D_e`, then `n_te` measurements `T_e`, then `n_tee`
/// measurements `T_{e,e'}`, all over one shared pool of qubit effects.
///
/// The pool starts with three random effects. Each later pool member is the
/// midpoint `(e + e')/2` of two earlier ones, and the `T_{e,e'}` rows list those
/// generating pairs first; together with `D` and `T` rows on the same effects
/// this ties every pool member to the first three. Extra `T_{e,e'}` rows use
/// random pairs. `T_{e,e'}` is only formed when `e + e'` is an effect.
pub fn sample_3psm_prime(seed: u64, n_two: usize, n_te: usize, n_tee: usize) -> Result<Vec<Measurement>> {
    let mut rng = seeded(seed);
    let mut pool_size = n_two.max(n_te);
    if n_tee > 0 {
        pool_size = pool_size.max(2);
    }
    let mut pool = draw_anchors(&mut rng, pool_size.min(ANCHORS))?;
    let mut pairs = Vec::new();
    while pool.len() < pool_size {
        let (i, j) = random_pair(&mut rng, &pool)?;
        let mid = (pool[i].op() + pool[j].op()).scale(0.5);
        pool.push(Effect::new(mid)?);
        pairs.push((i, j));
    }
    while pairs.len() < n_tee {
        pairs.push(random_pair(&mut rng, &pool)?);
    }

    let mut out = Vec::with_capacity(n_two + n_te + n_tee);
    out.extend(pool.iter().take(n_two).map(d_e));
    out.extend(pool.iter().take(n_te).map(t_e));
    for &(i, j) in pairs.iter().take(n_tee) {
        out.push(t_ee(&pool[i], &pool[j])?);
    }
    Ok(out)
}

/// Sample for a measurement-set tag. `counts` holds `K` for the binary sets and
/// `(n_two, n_te, n_tee)` for the three-outcome set.
pub fn sample_measurements(tag: MeasurementSetTag, seed: u64, counts: &[usize]) -> Result<Vec<Measurement>> {
    let single = || -> Result<usize> {
        match counts {
            [k] => Ok(*k),
            _ => Err(Error::InvalidInput(format!("{tag} expects one count, got {}", counts.len()))),
        }
    };
    match tag {
        MeasurementSetTag::Pvm => Ok(sample_pvm(seed, single()?)),
        MeasurementSetTag::TwoPom => Ok(sample_two_outcome(seed, single()?)),
        MeasurementSetTag::ThreePsmPrime => match counts {
            [a, b, c] => sample_3psm_prime(seed, *a, *b, *c),
            _ => Err(Error::InvalidInput(format!("{tag} expects three counts, got {}", counts.len()))),
        },
        other => Err(Error::InvalidInput(format!("sampling is not available for {other}"))),
    }
}
