// Partition matrices: products, the action on colorings, projection to
// unlabeled partitions.
//
// ```bash
// cargo run --example partition_monoid
// ```

use efcp::partitions::{cyclic_shift_matrix, project};
use efcp::{Coloring, PartitionMatrix};

pub fn run_example() -> efcp::Result<()> {
    // columns are colorings: column c says where sites of color c go
    let a =
        PartitionMatrix::from_columns(&[Coloring::parse("1212", 2)?, Coloring::parse("2211", 2)?])?;
    let b =
        PartitionMatrix::from_columns(&[Coloring::parse("2121", 2)?, Coloring::parse("1122", 2)?])?;
    let ab = a.matmul(&b)?;
    println!("a * b = {}", serde_json::to_string(&ab).unwrap());

    let x = Coloring::parse("1122", 2)?;
    let direct = ab.act(&x)?;
    let stepwise = a.act(&b.act(&x)?)?;
    println!("(a*b) x = {direct}, a (b x) = {stepwise}");
    assert_eq!(direct, stepwise);

    println!("project(2211) = {}", project(&Coloring::parse("2211", 2)?));
    let y = Coloring::parse("1231", 3)?;
    let shift = cyclic_shift_matrix(&Coloring::parse("1112", 3)?);
    println!("shift by 1112 sends {y} to {}", shift.act(&y)?);
    Ok(())
}

#[allow(dead_code)]
fn main() -> efcp::Result<()> {
    run_example()
}
