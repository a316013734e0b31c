use std::fmt;

/// LTL over atoms of type `A`. `Release` only shows up after negation
/// normal form; the parser never produces it.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Ltl<A> {
    True,
    False,
    Atom(A),
    Not(Box<Ltl<A>>),
    And(Box<Ltl<A>>, Box<Ltl<A>>),
    Or(Box<Ltl<A>>, Box<Ltl<A>>),
    Implies(Box<Ltl<A>>, Box<Ltl<A>>),
    Next(Box<Ltl<A>>),
    Finally(Box<Ltl<A>>),
    Globally(Box<Ltl<A>>),
    Until(Box<Ltl<A>>, Box<Ltl<A>>),
    Release(Box<Ltl<A>>, Box<Ltl<A>>),
}

/// A run formula atom: a named node, or a flow subformula `A body`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum RunAtom {
    Name(String),
    Flow(FlowSubformula),
}

/// `A body`: `body` holds on every flow chain of the run.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FlowSubformula {
    pub body: Ltl<String>,
}

pub type RunFormula = Ltl<RunAtom>;

impl<A> Ltl<A> {
    pub fn atom(a: A) -> Self {
        Ltl::Atom(a)
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(f: Self) -> Self {
        Ltl::Not(Box::new(f))
    }

    pub fn and(a: Self, b: Self) -> Self {
        Ltl::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Self, b: Self) -> Self {
        Ltl::Or(Box::new(a), Box::new(b))
    }

    pub fn implies(a: Self, b: Self) -> Self {
        Ltl::Implies(Box::new(a), Box::new(b))
    }

    pub fn next(f: Self) -> Self {
        Ltl::Next(Box::new(f))
    }

    pub fn finally(f: Self) -> Self {
        Ltl::Finally(Box::new(f))
    }

    pub fn globally(f: Self) -> Self {
        Ltl::Globally(Box::new(f))
    }

    pub fn until(a: Self, b: Self) -> Self {
        Ltl::Until(Box::new(a), Box::new(b))
    }

    pub fn release(a: Self, b: Self) -> Self {
        Ltl::Release(Box::new(a), Box::new(b))
    }

    /// Conjunction of all items; `true` when empty.
    pub fn all(items: impl IntoIterator<Item = Self>) -> Self {
        items
            .into_iter()
            .reduce(Ltl::and)
            .unwrap_or(Ltl::True)
    }

    /// Disjunction of all items; `false` when empty.
    pub fn any(items: impl IntoIterator<Item = Self>) -> Self {
        items
            .into_iter()
            .reduce(Ltl::or)
            .unwrap_or(Ltl::False)
    }

    /// Replaces every atom by a formula, stopping at the first error.
    pub fn try_substitute<B, E>(
        &self,
        f: &mut impl FnMut(&A) -> Result<Ltl<B>, E>,
    ) -> Result<Ltl<B>, E> {
        use Ltl::*;
        Ok(match self {
            True => True,
            False => False,
            Atom(a) => f(a)?,
            Not(x) => Ltl::not(x.try_substitute(f)?),
            And(a, b) => Ltl::and(a.try_substitute(f)?, b.try_substitute(f)?),
            Or(a, b) => Ltl::or(a.try_substitute(f)?, b.try_substitute(f)?),
            Implies(a, b) => Ltl::implies(a.try_substitute(f)?, b.try_substitute(f)?),
            Next(x) => Ltl::next(x.try_substitute(f)?),
            Finally(x) => Ltl::finally(x.try_substitute(f)?),
            Globally(x) => Ltl::globally(x.try_substitute(f)?),
            Until(a, b) => Ltl::until(a.try_substitute(f)?, b.try_substitute(f)?),
            Release(a, b) => Ltl::release(a.try_substitute(f)?, b.try_substitute(f)?),
        })
    }

    pub fn substitute<B>(&self, f: &mut impl FnMut(&A) -> Ltl<B>) -> Ltl<B> {
        let r: Result<_, std::convert::Infallible> = self.try_substitute(&mut |a| Ok(f(a)));
        match r {
            Ok(v) => v,
            Err(e) => match e {},
        }
    }

    pub fn map_atoms<B>(&self, f: &mut impl FnMut(&A) -> B) -> Ltl<B> {
        self.substitute(&mut |a| Ltl::Atom(f(a)))
    }

    pub fn atoms(&self) -> Vec<&A> {
        let mut out = Vec::new();
        self.visit(&mut |f| {
            if let Ltl::Atom(a) = f {
                out.push(a);
            }
        });
        out
    }

    /// Pre-order traversal.
    pub fn visit<'a>(&'a self, f: &mut impl FnMut(&'a Ltl<A>)) {
        f(self);
        for c in self.children() {
            c.visit(f);
        }
    }

    pub fn children(&self) -> Vec<&Ltl<A>> {
        use Ltl::*;
        match self {
            True | False | Atom(_) => vec![],
            Not(x) | Next(x) | Finally(x) | Globally(x) => vec![x],
            And(a, b) | Or(a, b) | Implies(a, b) | Until(a, b) | Release(a, b) => vec![a, b],
        }
    }

    /// Nesting depth of connectives; atoms and constants have depth 0.
    pub fn depth(&self) -> usize {
        self.children()
            .iter()
            .map(|c| c.depth() + 1)
            .max()
            .unwrap_or(0)
    }

    /// No temporal operator anywhere.
    pub fn is_propositional(&self) -> bool {
        use Ltl::*;
        match self {
            True | False | Atom(_) => true,
            Not(x) => x.is_propositional(),
            And(a, b) | Or(a, b) | Implies(a, b) => a.is_propositional() && b.is_propositional(),
            Next(_) | Finally(_) | Globally(_) | Until(..) | Release(..) => false,
        }
    }

    /// Evaluates a propositional formula; temporal operators panic.
    pub fn eval_prop(&self, val: &impl Fn(&A) -> bool) -> bool {
        use Ltl::*;
        match self {
            True => true,
            False => false,
            Atom(a) => val(a),
            Not(x) => !x.eval_prop(val),
            And(a, b) => a.eval_prop(val) && b.eval_prop(val),
            Or(a, b) => a.eval_prop(val) || b.eval_prop(val),
            Implies(a, b) => !a.eval_prop(val) || b.eval_prop(val),
            _ => panic!("eval_prop on a temporal formula"),
        }
    }
}

impl RunFormula {
    /// Flow subformulas in syntactic (left-to-right) order.
    pub fn flow_subformulas(&self) -> Vec<&FlowSubformula> {
        self.atoms()
            .into_iter()
            .filter_map(|a| match a {
                RunAtom::Flow(f) => Some(f),
                RunAtom::Name(_) => None,
            })
            .collect()
    }
}

fn prec<A>(f: &Ltl<A>) -> u8 {
    use Ltl::*;
    match f {
        Implies(..) => 1,
        Or(..) => 2,
        And(..) => 3,
        Until(..) | Release(..) => 4,
        Not(_) | Next(_) | Finally(_) | Globally(_) => 5,
        True | False | Atom(_) => 6,
    }
}

struct Child<'a, A>(&'a Ltl<A>, bool);

impl<A: fmt::Display> fmt::Display for Child<'_, A> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.1 {
            write!(f, "({})", self.0)
        } else {
            write!(f, "{}", self.0)
        }
    }
}

/// Prints in the concrete syntax accepted by the parser, with only the
/// parentheses that precedence and associativity require.
impl<A: fmt::Display> fmt::Display for Ltl<A> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use Ltl::*;
        let p = prec(self);
        let bin = |f: &mut fmt::Formatter<'_>, op: &str, a: &Ltl<A>, b: &Ltl<A>, left: bool| {
            // left-assoc: right child needs parens at equal precedence; right-assoc the reverse
            let pa = if left { prec(a) < p } else { prec(a) <= p };
            let pb = if left { prec(b) <= p } else { prec(b) < p };
            write!(f, "{} {op} {}", Child(a, pa), Child(b, pb))
        };
        match self {
            True => f.write_str("true"),
            False => f.write_str("false"),
            Atom(a) => write!(f, "{a}"),
            Not(x) => write!(f, "!{}", Child(x, prec(x.as_ref()) < p)),
            Next(x) => write!(f, "X {}", Child(x, prec(x.as_ref()) < p)),
            Finally(x) => write!(f, "F {}", Child(x, prec(x.as_ref()) < p)),
            Globally(x) => write!(f, "G {}", Child(x, prec(x.as_ref()) < p)),
            And(a, b) => bin(f, "&&", a, b, true),
            Or(a, b) => bin(f, "||", a, b, true),
            Until(a, b) => bin(f, "U", a, b, true),
            Release(a, b) => bin(f, "R", a, b, true),
            Implies(a, b) => bin(f, "->", a, b, false),
        }
    }
}

impl fmt::Display for RunAtom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RunAtom::Name(n) => f.write_str(n),
            RunAtom::Flow(fl) => {
                let body = &fl.body;
                if prec(body) < 5 {
                    write!(f, "A ({body})")
                } else {
                    write!(f, "A {body}")
                }
            }
        }
    }
}
