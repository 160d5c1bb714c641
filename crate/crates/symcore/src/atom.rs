use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::sync::{Arc, RwLock};

use once_cell::sync::Lazy;

use crate::ratfunc::RatFunc;

/// Handle to an interned [`Atom`].
///
/// Handles are process-wide and stable for the lifetime of the process. Their
/// numeric order fixes the internal monomial order but never leaks into
/// rendered output, which sorts by label.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Var(u32);

/// An indeterminate of the polynomial ring.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub enum Atom {
    /// Field variable, jet variable, independent variable or parameter.
    Symbol(Arc<str>),
    /// `name` differentiated `order` times, applied to a rational argument.
    Func { name: Arc<str>, order: u32, arg: RatFunc },
    /// Logarithm of a rational argument.
    Log(RatFunc),
}

struct Entry {
    atom: Atom,
    deps: BTreeSet<Var>,
    label: Arc<str>,
}

#[derive(Default)]
struct Interner {
    entries: Vec<Arc<Entry>>,
    index: HashMap<Atom, Var>,
}

static INTERNER: Lazy<RwLock<Interner>> = Lazy::new(Default::default);

impl Var {
    pub fn symbol(name: &str) -> Var {
        Var::intern(Atom::Symbol(Arc::from(name)))
    }

    pub fn func(name: &str, order: u32, arg: RatFunc) -> Var {
        Var::intern(Atom::Func { name: Arc::from(name), order, arg })
    }

    pub fn log(arg: RatFunc) -> Var {
        Var::intern(Atom::Log(arg))
    }

    pub fn intern(atom: Atom) -> Var {
        if let Some(v) = INTERNER.read().unwrap().index.get(&atom) {
            return *v;
        }
        // label and dependency set read other entries, so build them before
        // taking the write lock
        let (deps, label): (BTreeSet<Var>, Arc<str>) = match &atom {
            Atom::Symbol(name) => (BTreeSet::new(), name.clone()),
            Atom::Func { name, order, arg } => {
                let primes = "'".repeat(*order as usize);
                (arg.symbols(), format!("{name}{primes}({arg})").into())
            }
            Atom::Log(arg) => (arg.symbols(), format!("ln({arg})").into()),
        };
        let mut guard = INTERNER.write().unwrap();
        if let Some(v) = guard.index.get(&atom) {
            return *v;
        }
        let var = Var(u32::try_from(guard.entries.len()).expect("atom table overflow"));
        let deps = if matches!(atom, Atom::Symbol(_)) {
            BTreeSet::from([var])
        } else {
            deps
        };
        guard.entries.push(Arc::new(Entry {
            atom: atom.clone(),
            deps,
            label,
        }));
        guard.index.insert(atom, var);
        var
    }

    fn entry(self) -> Arc<Entry> {
        INTERNER.read().unwrap().entries[self.0 as usize].clone()
    }

    pub fn atom(self) -> Atom {
        self.entry().atom.clone()
    }

    /// Rendered form, used for display and for deterministic ordering.
    pub fn label(self) -> Arc<str> {
        self.entry().label.clone()
    }

    pub fn is_symbol(self) -> bool {
        matches!(self.entry().atom, Atom::Symbol(_))
    }

    /// Symbol atoms this atom depends on (itself, for a symbol).
    pub fn symbols(self) -> BTreeSet<Var> {
        self.entry().deps.clone()
    }

    pub fn depends_on(self, v: Var) -> bool {
        self == v || self.entry().deps.contains(&v)
    }
}

impl fmt::Debug for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.label())
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}
