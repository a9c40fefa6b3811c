//! The worked systems used throughout the test suite and the CLI catalog.
//!
//! All of them are coupled cubically semi-linear pairs except the rational
//! appendix system. `cubic_family(beta, gamma)` builds
//!
//!   f1'' = beta*P - gamma*Q,   f2'' = gamma*P + beta*Q
//!
//! with P = f1'^3 - 3 f1' f2'^2 and Q = 3 f1'^2 f2' - f2'^3, i.e. the real
//! and imaginary parts of (beta + i gamma) (f1' + i f2')^3.

use crate::complexify::OdeSystem;
use crate::expr::Expr;

pub fn cubic_family(beta: Expr, gamma: Expr) -> OdeSystem {
    let p = Expr::f1p().pow(3) - Expr::int(3) * Expr::f1p() * Expr::f2p().pow(2);
    let q = Expr::int(3) * Expr::f1p().pow(2) * Expr::f2p() - Expr::f2p().pow(3);
    OdeSystem::new(
        beta.clone() * p.clone() - gamma.clone() * q.clone(),
        gamma * p + beta * q,
    )
}

/// Four symmetries; base equation u'' = u'^3.
pub fn cubic_const() -> OdeSystem {
    cubic_family(Expr::int(1), Expr::int(0))
}

/// Three symmetries; base equation u'' = x u'^3.
pub fn cubic_x() -> OdeSystem {
    cubic_family(Expr::x(), Expr::int(0))
}

/// Two symmetries; base equation u'' = u u'^3.
pub fn cubic_u() -> OdeSystem {
    cubic_family(Expr::f1(), Expr::f2())
}

/// One symmetry; base equation u'' = x u u'^3 (Airy after the hodograph).
pub fn cubic_xu() -> OdeSystem {
    cubic_family(Expr::x() * Expr::f1(), Expr::x() * Expr::f2())
}

/// No point symmetry; base equation u'' = x u^2 u'^3.
///
/// Stored as the realification of that base equation. The source text shows
/// three mutually inconsistent variants (coefficient x vs x^2 and a sign);
/// this is the one consistent with the stated scalar equation.
pub fn cubic_xu2() -> OdeSystem {
    cubic_family(
        Expr::x() * (Expr::f1().pow(2) - Expr::f2().pow(2)),
        Expr::int(2) * Expr::x() * Expr::f1() * Expr::f2(),
    )
}

/// Coupled modified Emden system; base equation u'' + 3 u u' + u^3 = 0.
pub fn emden() -> OdeSystem {
    OdeSystem::new(
        Expr::int(-3) * Expr::f1() * Expr::f1p() + Expr::int(3) * Expr::f2() * Expr::f2p()
            - Expr::f1().pow(3)
            + Expr::int(3) * Expr::f1() * Expr::f2().pow(2),
        Expr::int(-3) * Expr::f2() * Expr::f1p() - Expr::int(3) * Expr::f1() * Expr::f2p()
            + Expr::f2().pow(3)
            - Expr::int(3) * Expr::f1().pow(2) * Expr::f2(),
    )
}

/// Rational appendix system; base equation u'' = u'/u^2 (G2-integrable,
/// not complex linearizable).
pub fn rational_g2() -> OdeSystem {
    let den = (Expr::f1().pow(2) - Expr::f2().pow(2)).pow(2)
        + Expr::int(4) * Expr::f1().pow(2) * Expr::f2().pow(2);
    let omega1 = ((Expr::f1().pow(2) - Expr::f2().pow(2)) * Expr::f1p()
        + Expr::int(2) * Expr::f1() * Expr::f2() * Expr::f2p())
        / den.clone();
    let omega2 = ((Expr::f1().pow(2) - Expr::f2().pow(2)) * Expr::f2p()
        - Expr::int(2) * Expr::f1() * Expr::f2() * Expr::f1p())
        / den;
    OdeSystem::new(omega1, omega2)
}

pub fn all_systems() -> Vec<(&'static str, OdeSystem)> {
    vec![
        ("cubic_const", cubic_const()),
        ("cubic_x", cubic_x()),
        ("cubic_u", cubic_u()),
        ("cubic_xu", cubic_xu()),
        ("emden", emden()),
        ("cubic_xu2", cubic_xu2()),
        ("rational_g2", rational_g2()),
    ]
}
