//! Parse and evaluate chart expressions.
//!
//! `cargo run --example parse_expression -- "sin(x)^2 + c*y" 0.3 2.0`

use kmn_core::expr;

fn main() {
    let mut args = std::env::args().skip(1);
    let source = args.next().unwrap_or_else(|| "1/4 + y^2/4 - c*exp(-x)".into());
    let values: Vec<f64> = args.map(|a| a.parse().expect("coordinate values are numbers")).collect();
    let point = if values.is_empty() { vec![0.5, -1.0] } else { values };

    let chart = ["x", "y"];
    let constants = ["c"];
    match expr::parse(&source, &chart, &constants) {
        Ok(e) => {
            println!("parsed:   {e}");
            println!("constant: {}", e.is_constant());
            match e.eval(&point, &[0.25]) {
                Ok(v) => println!("value at {point:?} with c = 0.25: {v}"),
                Err(err) => println!("evaluation failed: {err}"),
            }
        }
        Err(err) => {
            println!("{source}");
            println!("{}^", " ".repeat(err.offset));
            println!("{err}");
        }
    }

    // Domain errors name the failing subexpression.
    let e = expr::parse("sqrt(x - 1) + y", &chart, &constants).unwrap();
    println!("{}", e.eval(&[0.0, 1.0], &[0.0]).unwrap_err());
}
