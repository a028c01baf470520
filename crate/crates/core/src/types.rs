//! Simple types, sorts and type declarations.

use std::fmt;
use std::sync::Arc;

pub type Name = Arc<str>;

/// A base type.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Sort(pub Name);

impl Sort {
    pub fn new(name: &str) -> Sort {
        Sort(Name::from(name))
    }

    pub fn name(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for Sort {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum TypeKind {
    Sort(Sort),
    Arrow(Type, Type),
}

/// A simple type: a sort or an arrow `σ ⇒ τ`. Cheap to clone.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Type(Arc<TypeKind>);

impl Type {
    pub fn sort(name: &str) -> Type {
        Type(Arc::new(TypeKind::Sort(Sort::new(name))))
    }

    pub fn of_sort(sort: &Sort) -> Type {
        Type(Arc::new(TypeKind::Sort(sort.clone())))
    }

    pub fn arrow(from: Type, to: Type) -> Type {
        Type(Arc::new(TypeKind::Arrow(from, to)))
    }

    /// `args[0] ⇒ ... ⇒ args[n-1] ⇒ result`.
    pub fn curried(args: &[Type], result: Type) -> Type {
        args.iter()
            .rev()
            .fold(result, |acc, a| Type::arrow(a.clone(), acc))
    }

    pub fn kind(&self) -> &TypeKind {
        &self.0
    }

    pub fn as_sort(&self) -> Option<&Sort> {
        match &*self.0 {
            TypeKind::Sort(s) => Some(s),
            TypeKind::Arrow(..) => None,
        }
    }

    pub fn is_sort(&self) -> bool {
        self.as_sort().is_some()
    }

    pub fn as_arrow(&self) -> Option<(&Type, &Type)> {
        match &*self.0 {
            TypeKind::Arrow(a, b) => Some((a, b)),
            TypeKind::Sort(_) => None,
        }
    }

    /// Splits `τ1 ⇒ ... ⇒ τm ⇒ ι` into `([τ1..τm], ι)`.
    pub fn uncurry(&self) -> (Vec<Type>, Sort) {
        let mut args = Vec::new();
        let mut cur = self;
        loop {
            match &*cur.0 {
                TypeKind::Sort(s) => return (args, s.clone()),
                TypeKind::Arrow(a, b) => {
                    args.push(a.clone());
                    cur = b;
                }
            }
        }
    }

    /// The sort at the end of the arrow spine.
    pub fn output_sort(&self) -> &Sort {
        let mut cur = self;
        loop {
            match &*cur.0 {
                TypeKind::Sort(s) => return s,
                TypeKind::Arrow(_, b) => cur = b,
            }
        }
    }

    /// `ord(ι) = 0`, `ord(σ ⇒ τ) = max(ord(σ) + 1, ord(τ))`.
    pub fn order(&self) -> u32 {
        match &*self.0 {
            TypeKind::Sort(_) => 0,
            TypeKind::Arrow(a, b) => (a.order() + 1).max(b.order()),
        }
    }

    pub fn sorts(&self, out: &mut Vec<Sort>) {
        match &*self.0 {
            TypeKind::Sort(s) => {
                if !out.contains(s) {
                    out.push(s.clone())
                }
            }
            TypeKind::Arrow(a, b) => {
                a.sorts(out);
                b.sorts(out);
            }
        }
    }
}

impl fmt::Display for Type {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &*self.0 {
            TypeKind::Sort(s) => write!(f, "{s}"),
            TypeKind::Arrow(a, b) => {
                if a.is_sort() {
                    write!(f, "{a} -> {b}")
                } else {
                    write!(f, "({a}) -> {b}")
                }
            }
        }
    }
}

/// Declaration `[σ1 × ... × σn] ⇒ ι` of a function symbol.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct TypeDecl {
    pub args: Vec<Type>,
    pub output: Sort,
}

impl TypeDecl {
    pub fn new(args: Vec<Type>, output: Sort) -> TypeDecl {
        TypeDecl { args, output }
    }

    pub fn constant(output: Sort) -> TypeDecl {
        TypeDecl {
            args: Vec::new(),
            output,
        }
    }

    pub fn arity(&self) -> usize {
        self.args.len()
    }

    /// 0 for constants, otherwise `1 + max ord(σi)`.
    pub fn order(&self) -> u32 {
        self.args.iter().map(|t| t.order() + 1).max().unwrap_or(0)
    }

    pub fn output_type(&self) -> Type {
        Type::of_sort(&self.output)
    }
}

impl fmt::Display for TypeDecl {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.args.is_empty() {
            return write!(f, "{}", self.output);
        }
        f.write_str("[")?;
        for (i, a) in self.args.iter().enumerate() {
            if i > 0 {
                f.write_str(" x ")?;
            }
            if a.is_sort() {
                write!(f, "{a}")?;
            } else {
                write!(f, "({a})")?;
            }
        }
        write!(f, "] => {}", self.output)
    }
}

/// A function symbol with its declaration. Symbols compare by name and declaration.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Symbol(Arc<SymbolData>);

#[derive(Debug, PartialEq, Eq, Hash)]
struct SymbolData {
    name: Name,
    decl: TypeDecl,
}

impl Symbol {
    pub fn new(name: &str, decl: TypeDecl) -> Symbol {
        Symbol(Arc::new(SymbolData {
            name: Name::from(name),
            decl,
        }))
    }

    pub fn name(&self) -> &str {
        &self.0.name
    }

    pub fn name_rc(&self) -> &Name {
        &self.0.name
    }

    pub fn decl(&self) -> &TypeDecl {
        &self.0.decl
    }

    pub fn arity(&self) -> usize {
        self.0.decl.args.len()
    }

    pub fn ptr_eq(&self, other: &Symbol) -> bool {
        Arc::ptr_eq(&self.0, &other.0)
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} : {}", self.0.name, self.0.decl)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn orders() {
        let b = Type::sort("bool");
        let s = Type::sort("string");
        assert_eq!(s.order(), 0);
        assert_eq!(Type::arrow(b.clone(), b.clone()).order(), 1);
        let decl = TypeDecl::new(
            vec![Type::arrow(b.clone(), b.clone()), s.clone()],
            Sort::new("string"),
        );
        assert_eq!(decl.order(), 2);
        assert_eq!(TypeDecl::constant(Sort::new("bool")).order(), 0);
        let sb = Type::arrow(s.clone(), b.clone());
        assert_eq!(Type::arrow(sb.clone(), s.clone()).order(), 2);
        assert_eq!(Type::arrow(s.clone(), sb).order(), 1);
    }

    #[test]
    fn uncurry_roundtrip() {
        let s = Type::sort("string");
        let b = Type::sort("bool");
        let t = Type::curried(&[s.clone(), Type::arrow(s.clone(), b.clone())], b.clone());
        let (args, out) = t.uncurry();
        assert_eq!(args.len(), 2);
        assert_eq!(out, Sort::new("bool"));
        assert_eq!(Type::curried(&args, Type::of_sort(&out)), t);
        assert_eq!(t.to_string(), "string -> (string -> bool) -> bool");
    }
}
