//! Exact distances of Eve's view on micro instances.

use ikem::harness::{
    cea_bound_check, exact_challenge_distribution, lhl_bound, ot_bound_check, transcript_distance,
};
use ikem::ikem::{derive_params, ParamsBuilder};
use ikem::source::Coord;
use ikem::JointSource;

fn main() -> ikem::Result<()> {
    // two uniform bits, Eve sees nothing: the key still leaks through the
    // zero multiplier
    let cells: Vec<_> = (0..4).map(|x| (x, x, 0, 0.25)).collect();
    let blind = JointSource::from_cells([4, 4, 1], &cells)?;
    let p = ParamsBuilder::new(&blind, 1, 0.5, 0.5, 0)?
        .force_t(1)
        .force_ell(1)
        .field_bits(2)
        .build()?;
    let view = exact_challenge_distribution(&blind, &p)?;
    println!(
        "blind Eve, w = 2: SD = {} (7/32 = {})",
        view.distance(),
        7.0 / 32.0
    );

    // Eve holds x
    let cells: Vec<_> = (0..4).map(|x| (x, x, x, 0.25)).collect();
    let seeing = JointSource::from_cells([4, 4, 4], &cells)?;
    let p = ParamsBuilder::new(&seeing, 1, 0.5, 0.5, 0)?
        .force_t(1)
        .force_ell(1)
        .build()?;
    println!(
        "seeing Eve: SD = {}",
        transcript_distance(&seeing, &p, 0)?.0
    );

    // honest parameters on a leaky binary source
    let src = JointSource::from_cells(
        [2, 2, 2],
        &[
            (0, 0, 0, 0.3),
            (0, 0, 1, 0.2),
            (1, 1, 0, 0.2),
            (1, 1, 1, 0.3),
        ],
    )?;
    let p = derive_params(&src, 4, 0.5, 0.4, 0)?;
    let r = ot_bound_check(&src, &p)?;
    let h = src.iid_cond_min_entropy(Coord::X, &[Coord::Z], 4)?;
    println!("{}", r.to_json());
    println!("leftover-hash bound: {:.4}", lhl_bound(p.t(), p.ell(), h));

    let p1 = derive_params(&src, 4, 0.5, 0.9, 1)?;
    println!("{}", cea_bound_check(&src, &p1, 1)?.to_json());
    Ok(())
}
