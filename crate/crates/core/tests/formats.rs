use homcount::formats::*;
use homcount::gausssum::QuadPoly;
use homcount::model::{MultiGraph, PureEntry};
use num_bigint::BigInt;

use homcount::cyclotomic::Rational;

fn q(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

#[test]
fn entry_tokens() {
    assert_eq!(parse_entry("3/2*w(8,5)", 1).unwrap(), PureEntry::new(q(3, 2), 8, 5).unwrap());
    let zero = parse_entry("0", 1).unwrap();
    assert!(zero.is_zero());
    assert_eq!((zero.root_order(), zero.root_exp()), (1, 0));
    // a negative sign folds into ω_2
    assert_eq!(parse_entry("-1/3", 1).unwrap(), PureEntry::new(q(1, 3), 2, 1).unwrap());
    // roots reduce to lowest order
    assert_eq!(parse_entry("1*w(8,4)", 1).unwrap(), PureEntry::new(q(1, 1), 2, 1).unwrap());
    assert_eq!(format_entry(&parse_entry("-2*w(4,1)", 1).unwrap()), "2/1*w(4,3)");
}

#[test]
fn bad_entry_tokens() {
    for tok in ["", "1/0", "1/-2", "x", "1*w(0,1)", "1*w(4)", "1*v(4,1)", "1*w(4,1", "1*w(70000,1)"] {
        assert!(parse_entry(tok, 3).is_err(), "{tok}");
    }
}

#[test]
fn matrix_text() {
    let a = parse_matrix("# hadamard\nmatrix 2\n0 0 1\n0 1 1  # off-diagonal\n1 1 -1\n").unwrap();
    assert_eq!(a.dim(), 2);
    assert_eq!(a.get(1, 0), a.get(0, 1));
    assert_eq!(parse_matrix(&serialize_matrix(&a)).unwrap(), a);
    let sparse = parse_matrix("matrix 3\n0 2 5/7\n").unwrap();
    assert!(sparse.get(1, 1).is_zero());
    assert_eq!(sparse.get(2, 0), &PureEntry::new(q(5, 7), 1, 0).unwrap());
}

#[test]
fn matrix_errors() {
    let cases = [
        ("", 0),
        ("graph 2\n", 1),
        ("matrix 0\n", 1),
        ("matrix 2\n1 0 1\n", 2),
        ("matrix 2\n0 0 1\n0 0 1\n", 3),
        ("matrix 2\n0 5 1\n", 2),
        ("matrix 2\n0 1\n", 2),
        ("matrix 2 3\n", 1),
        ("matrix 2\n\n\n0 1 1*w(q,1)\n", 4),
    ];
    for (text, line) in cases {
        let e = parse_matrix(text).unwrap_err();
        assert_eq!(e.line, line, "{text:?}: {e}");
    }
}

#[test]
fn graph_text() {
    let g = parse_graph("graph 4\n0 1 2\n2 2 1\n").unwrap();
    assert_eq!(g.vertex_count(), 4);
    assert_eq!(g.total_multiplicity(), 3);
    assert!(g.has_self_loop());
    assert_eq!(parse_graph(&serialize_graph(&g)).unwrap(), g);
    assert_eq!(parse_graph("graph 0\n").unwrap(), MultiGraph::new(0));
    assert!(parse_graph("graph 2\n0 2 1\n").is_err());
    assert!(parse_graph("graph 2\n0 1 x\n").is_err());
    assert!(parse_graph("graph 2\n0 1 1 1\n").is_err());
}

#[test]
fn poly_text() {
    let f = parse_poly("poly q=8 n=2\nq 0 0 3\nq 0 1 -1\nl 1 9\nk 5\n").unwrap();
    let mut g = QuadPoly::new(8, 2).unwrap();
    g.add_quad(0, 0, 3);
    g.add_quad(0, 1, 7);
    g.add_lin(1, 1);
    g.add_const(5);
    assert_eq!(f, g);
    assert_eq!(parse_poly(&serialize_poly(&f)).unwrap(), f);
    for bad in [
        "poly q=6 n=1\n",
        "poly q=4\n",
        "poly q=4 n=1\nq 1 0 1\n",
        "poly q=4 n=2\nq 1 0 1\n",
        "poly q=4 n=1\nl 0\n",
        "poly q=4 n=1\nz 0 1\n",
    ] {
        assert!(parse_poly(bad).is_err(), "{bad:?}");
    }
}
