//! Bob's candidate list for a received string.

use ikem::ikem::{enumerate_typical, TypicalSet};
use ikem::JointSource;

fn main() -> ikem::Result<()> {
    let src = JointSource::satellite(0.1, 0.1, 0.3)?;
    let model = src.x_given_y();
    let y = [0, 1, 1, 0, 1, 0];
    for nu in [0.6, 2.0, 4.0, 8.0] {
        let list = enumerate_typical(&model, &y, nu)?;
        println!(
            "nu = {nu}: {} candidates (at most 2^nu = {:.1})",
            list.len(),
            nu.exp2()
        );
    }
    for x in TypicalSet::new(&model, &y, 4.0)?.take(4) {
        println!("  {x:?}  surprisal {:.3}", model.surprisal(&x, &y)?);
    }
    Ok(())
}
