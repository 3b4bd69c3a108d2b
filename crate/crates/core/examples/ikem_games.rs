//! Indistinguishability games with several adversaries.

use ikem::dem::Scheme;
use ikem::harness::{
    run_he_game, run_ikem_game, transcript_distance, BestGuess, HeBestGuess, HeOmniscient,
    Omniscient, QueryThenGuess, RandomGuess,
};
use ikem::ikem::ParamsBuilder;
use ikem::JointSource;

fn main() -> ikem::Result<()> {
    let src = JointSource::from_cells(
        [2, 2, 2],
        &[
            (0, 0, 0, 0.35),
            (0, 0, 1, 0.15),
            (1, 1, 0, 0.15),
            (1, 1, 1, 0.35),
        ],
    )?;
    let p = ParamsBuilder::new(&src, 3, 0.5, 0.45, 1)?
        .force_t(1)
        .force_ell(2)
        .build()?;
    let trials = 20_000;
    let (sd, _) = transcript_distance(&src, &p, 0)?;
    println!(
        "exact SD = {sd:.4}; the best adversary reaches SD/2 = {:.4}",
        sd / 2.0
    );

    let reports = [
        run_ikem_game(&src, &p, &mut RandomGuess, 0, trials, 1)?,
        run_ikem_game(&src, &p, &mut BestGuess::new(&src, &p)?, 0, trials, 1)?,
        run_ikem_game(&src, &p, &mut QueryThenGuess { queries: 1 }, 1, trials, 1)?,
        run_ikem_game(&src, &p, &mut Omniscient::new(&p), 0, trials, 1)?,
        run_he_game(
            &src,
            &p,
            &mut HeBestGuess::new(&src, &p)?,
            0,
            trials,
            1,
            Scheme::Otp,
        )?,
        run_he_game(
            &src,
            &p,
            &mut HeOmniscient::new(&p),
            0,
            trials,
            1,
            Scheme::Otp,
        )?,
    ];
    // the omniscient adversaries read x and are expected to break the bound
    for r in reports {
        println!(
            "{:<28} advantage {:.4}  bound {:.3}  pass {}",
            r.game, r.advantage, r.bound, r.pass
        );
    }
    Ok(())
}
