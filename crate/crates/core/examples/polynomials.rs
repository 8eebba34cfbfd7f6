//! Exact polynomial arithmetic over the rationals, with `eps^2 = 1`.

use std::collections::BTreeMap;

use pclab::scalar::{parse_expr, rat, VarList};

fn main() {
    let vars = VarList::new(["beta", "gamma", "eps"]);
    let p = parse_expr("(beta - gamma)^2 - 4", &vars).unwrap_or_else(|e| panic!("{e}"));
    let q = parse_expr("beta - gamma + 2", &vars).unwrap();
    println!("p = {p}");
    println!("p / (beta - gamma + 2) = {}", p.exact_div(&q).unwrap());

    let e = parse_expr("eps", &vars).unwrap();
    println!("eps^3 = {}", e.pow(3));

    let at = BTreeMap::from([("beta".to_string(), rat(5, 2)), ("gamma".to_string(), rat(1, 2))]);
    println!("p(5/2, 1/2) = {}", p.substitute(&at).unwrap());

    match parse_expr("beta *", &vars) {
        Ok(_) => unreachable!(),
        Err(e) => println!("parse error: {e}"),
    }
}
