#![allow(dead_code)]

use terwilliger_wreath::{Moduli, Scheme};

pub fn moduli(v: &[usize]) -> Moduli {
    Moduli::new(v.to_vec()).unwrap()
}

/// Cayley scheme on Z4 x Z4 with connection set {±(1,0), ±(0,1), ±(1,1)}:
/// class 1 is the Shrikhande graph, class 2 its complement. Strongly regular
/// but not triply regular.
pub fn shrikhande() -> Scheme {
    let connection = [(1, 0), (3, 0), (0, 1), (0, 3), (1, 1), (3, 3)];
    Scheme::from_fn(16, 3, |x, y| {
        let d = ((y / 4 + 4 - x / 4) % 4, (y % 4 + 4 - x % 4) % 4);
        if d == (0, 0) {
            0
        } else if connection.contains(&d) {
            1
        } else {
            2
        }
    })
    .unwrap()
}
