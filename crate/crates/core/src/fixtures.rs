//! The natural-numbers worked example and the rules that drive it. Shared
//! by tests, the acceptance suite and the CLI's bundled fixtures.

pub const NAT: &str = "\
SPEC nat
SORTS N
OPS
0 : -> N
s : N -> N
_+_ : N N -> N
VARS
x y : N
EQNS
0 + y == y
s(x) + y == s(x + y)
";

/// `NAT` with the two lemmas leading to `1+1 == s(1)`.
pub const NAT_H: &str = "\
SPEC nat_h
SORTS N
OPS
0 : -> N
s : N -> N
_+_ : N N -> N
VARS
x y : N
EQNS
0 + y == y
s(x) + y == s(x + y)
s(0) + s(0) == s(0 + s(0))
s(0 + s(0)) == s(s(0))
";

/// `NAT` plus the terms `1+1` and `s(1)`.
pub const NAT_K: &str = "\
SPEC nat_k
SORTS N
OPS
0 : -> N
s : N -> N
_+_ : N N -> N
VARS
x y : N
TERMS
s(0) + s(0)
s(s(0))
EQNS
0 + y == y
s(x) + y == s(x + y)
";

/// The classic step's result: `NAT_H` and the conclusion.
pub const NAT_P: &str = "\
SPEC nat_p
SORTS N
OPS
0 : -> N
s : N -> N
_+_ : N N -> N
VARS
x y : N
EQNS
0 + y == y
s(x) + y == s(x + y)
s(0) + s(0) == s(0 + s(0))
s(0 + s(0)) == s(s(0))
s(0) + s(0) == s(s(0))
";

/// The pleopushout step's result: the lemmas are gone.
pub const NAT_C: &str = "\
SPEC nat_c
SORTS N
OPS
0 : -> N
s : N -> N
_+_ : N N -> N
VARS
x y : N
EQNS
0 + y == y
s(x) + y == s(x + y)
s(0) + s(0) == s(s(0))
";

pub const TRANSITIVITY: &str = "\
RULE trans
K:
  SORTS T
  OPS
  x z : -> T
  TERMS
  x
  z
H:
  SORTS T
  OPS
  x y z : -> T
  EQNS
  x == y
  y == z
C:
  SORTS T
  OPS
  x z : -> T
  EQNS
  x == z
";

pub const SYMMETRY: &str = "\
RULE sym
K:
  SORTS T
  OPS
  x y : -> T
  TERMS
  x
  y
H:
  SORTS T
  OPS
  x y : -> T
  EQNS
  x == y
C:
  SORTS T
  OPS
  x y : -> T
  EQNS
  y == x
";

/// Instantiates a two-variable axiom at ground arguments.
pub const SUBST: &str = "\
RULE subst
H:
  SORTS T
  OPS
  u w : T T -> T
  a b : -> T
  VARS
  p q : T
  EQNS
  u(p, q) == w(p, q)
C:
  SORTS T
  OPS
  u w : T T -> T
  a b : -> T
  EQNS
  u(a, b) == w(a, b)
";

/// Instantiates a one-variable axiom and applies a unary context.
pub const CONTEXT: &str = "\
RULE context
H:
  SORTS T
  OPS
  u w k : T -> T
  a : -> T
  VARS
  p : T
  EQNS
  u(p) == w(p)
C:
  SORTS T
  OPS
  u w k : T -> T
  a : -> T
  EQNS
  k(u(a)) == k(w(a))
";

/// Proves `1+1 == s(1)` from `NAT` in three steps.
pub const SCRIPT: &str = "\
step subst bind u=s(?1) + ?2 bind w=s(?1 + ?2) bind a=0 bind b=s(0)
step context bind u=0 + ?1 bind w=?1 bind k=s(?1) bind a=s(0)
step trans bind x=s(0) + s(0) bind y=s(0 + s(0)) bind z=s(s(0))
";

/// The integers modulo two, a model of `NAT`.
pub const MOD2: &str = "\
CARRIERS
N : 0 1
TABLES
0 = 0
s(0) = 1
s(1) = 0
+(0, 0) = 0
+(0, 1) = 1
+(1, 0) = 1
+(1, 1) = 0
";

/// All rules above, in one file.
pub fn rules() -> String {
    [TRANSITIVITY, SYMMETRY, SUBST, CONTEXT].concat()
}
