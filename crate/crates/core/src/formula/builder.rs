use super::*;

/// A variable named by its binding level (0 = outermost), independent of how
/// many binders separate it from its use site.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Var(usize);

/// Writes formulas with named variables and emits de Bruijn indices.
///
/// ```
/// use forcing_lab::formula::{Builder, render};
/// let (mut b, free) = Builder::new(1);
/// let a = free[0];
/// // ∀x. x ∈ a
/// let f = b.forall(|b, x| b.mem(x, a));
/// assert_eq!(render(&f), "Forall(Mem(0,1))");
/// ```
#[derive(Debug)]
pub struct Builder {
    depth: usize,
}

impl Builder {
    /// A builder whose formulas have `free` free variables; `vars[i]` is env index `i`.
    pub fn new(free: usize) -> (Builder, Vec<Var>) {
        let vars = (0..free).map(|i| Var(free - 1 - i)).collect();
        (Builder { depth: free }, vars)
    }

    fn index(&self, v: Var) -> usize {
        assert!(v.0 < self.depth, "variable used outside its binder");
        self.depth - 1 - v.0
    }

    pub fn mem(&self, a: Var, b: Var) -> Formula {
        member_fm(self.index(a), self.index(b))
    }

    pub fn eq(&self, a: Var, b: Var) -> Formula {
        equal_fm(self.index(a), self.index(b))
    }

    /// Binds a fresh variable for the duration of `body`.
    pub fn bind(&mut self, body: impl FnOnce(&mut Builder, Var) -> Formula) -> Formula {
        let v = Var(self.depth);
        self.depth += 1;
        let f = body(self, v);
        self.depth -= 1;
        f
    }

    pub fn forall(&mut self, body: impl FnOnce(&mut Builder, Var) -> Formula) -> Formula {
        forall_fm(self.bind(body))
    }

    pub fn exists(&mut self, body: impl FnOnce(&mut Builder, Var) -> Formula) -> Formula {
        exists_fm(self.bind(body))
    }

    /// Several nested universal binders; the closure receives them outermost first.
    pub fn forall_n(
        &mut self,
        n: usize,
        body: impl FnOnce(&mut Builder, &[Var]) -> Formula,
    ) -> Formula {
        let start = self.depth;
        let vars: Vec<Var> = (start..start + n).map(Var).collect();
        self.depth += n;
        let mut f = body(self, &vars);
        self.depth -= n;
        for _ in 0..n {
            f = forall_fm(f);
        }
        f
    }

    /// Instantiates a core formula: its free index `i` becomes `args[i]`.
    pub fn embed(&self, p: &Formula, args: &[Var]) -> Formula {
        assert!(p.arity() <= args.len(), "embed: arity exceeds argument count");
        let idx: Vec<usize> = args.iter().map(|v| self.index(*v)).collect();
        p.rename_free(&|i| idx[i])
    }
}
