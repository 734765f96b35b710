use std::time::Instant;
use torcen::constructor::{construct_spread, SearchBudget};
use torcen::spectrum::{classify, spread_spectrum};

fn main() {
    for (d, r) in [(4usize, 1u32), (6, 3), (8, 3)] {
        let t = Instant::now();
        let budget = SearchBudget::default();
        match construct_spread(d, r, &budget) {
            Ok((l, rep)) => {
                let spec = classify(&l).unwrap();
                let exps: Vec<f64> = spec.lyapunov.iter().map(|c| c.mid()).collect();
                println!("(d={d}, r={r}): seed {} -> {:?} in {:.2?} spread={}",
                    rep.seed, exps, t.elapsed(), spread_spectrum(&l, r).unwrap());
            }
            Err(e) => println!("(d={d}, r={r}): FAILED {e} in {:.2?}", t.elapsed()),
        }
    }
}
