//! Compare the full Kähler cone inequalities with `a > 0, b > 0`.

use hextremal::cone_check;

fn main() -> hextremal::Result<()> {
    let classes = [(1.0, 1.0), (2.0, 0.5), (-1.0, 2.0), (1.0, -0.1), (0.0, 1.0), (3.0, 3.0)];
    for (g, d) in [(2, -1), (3, -2), (2, 1)] {
        println!("g = {g}, d = {d}");
        for &(a, b) in &classes {
            let v = cone_check(g, d, a, b)?;
            let e = v.inequality_values;
            println!(
                "  a = {a:>4}, b = {b:>4}: [{:>6.2} {:>6.2} {:>6.2} {:>6.2} {:>6.2}] kahler = {:<5} simplified = {}",
                e[0], e[1], e[2], e[3], e[4], v.is_kahler, v.simplified
            );
        }
    }
    Ok(())
}
