//! Seeded search for functions far from a property.

use rand::Rng;
use rayon::prelude::*;
use symtest_core::oracle::{enumerated_distance, exact_distance};
use symtest_core::property::format_rational;
use symtest_core::rng::trial_rng;
use symtest_core::{BoolFunction, Error, Property, Rational, Result};

/// Random restarts per search.
pub const RESTARTS: u64 = 64;

/// Largest domain on which the returned witness is re-checked by scanning
/// every member of the property.
const RESCAN_LIMIT: usize = 16;

/// A function with `exact_distance(f, P) > ε`, found by seeded random restarts
/// followed by steepest-ascent single-bit flips. Restart `r` draws its start
/// from stream `r` of `seed`. The witness is re-checked by the oracle before
/// it is returned.
pub fn generate_far_function(property: &Property, epsilon: Rational, seed: u64) -> Result<BoolFunction> {
    let domain = property.domain();
    let n = domain.size();
    for restart in 0..RESTARTS {
        let mut rng = trial_rng(seed, restart);
        let bits: Vec<bool> = (0..n).map(|_| rng.gen()).collect();
        let mut f = BoolFunction::from_fn(domain.clone(), |x| bits[x]);
        let mut d = exact_distance(&f, property)?;
        loop {
            if d > epsilon {
                verify(&f, property, epsilon, d)?;
                return Ok(f);
            }
            let flips: Vec<Rational> = (0..n)
                .into_par_iter()
                .map(|x| {
                    let mut g = f.clone();
                    g.flip(x);
                    exact_distance(&g, property)
                })
                .collect::<Result<_>>()?;
            let (best, best_d) = flips
                .iter()
                .enumerate()
                .fold((None, d), |(bi, bd), (x, &dx)| if dx > bd { (Some(x), dx) } else { (bi, bd) });
            match best {
                Some(x) => {
                    f.flip(x);
                    d = best_d;
                }
                None => break,
            }
        }
    }
    Err(Error::NoWitness(format!(
        "no function farther than {} from {} after {RESTARTS} restarts",
        format_rational(&epsilon),
        property.name()
    )))
}

fn verify(f: &BoolFunction, property: &Property, epsilon: Rational, found: Rational) -> Result<()> {
    let again = if f.len() <= RESCAN_LIMIT {
        enumerated_distance(f, property)?
    } else {
        exact_distance(f, property)?
    };
    if again != found || again <= epsilon {
        return Err(Error::Internal(format!(
            "far witness {} failed the distance re-check",
            f.to_hex()
        )));
    }
    Ok(())
}
