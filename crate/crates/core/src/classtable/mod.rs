//! Dense identifier spaces of the flattened program: class ids, method ids,
//! the uniform field layout, the subclass matrix and mangled names.

use std::fmt::{self, Write as _};

use indexmap::IndexMap;
use thiserror::Error;

use crate::desugar::OBJECT;
use crate::frontend::ast::*;
use crate::span::SourceSpan;
use crate::stdlib::LibKind;

pub use crate::desugar::mangle_inner;

pub type ClassId = u32;

/// Static type of a value.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum TypeTag {
    Int,
    Bool,
    Str,
    Char,
    Obj(ClassId),
    Void,
    Lib(LibKind),
    /// Erased element type; assignable to and from every reference type.
    AnyObj,
    /// Type of `null`.
    Null,
}

impl TypeTag {
    pub fn is_ref(self) -> bool {
        matches!(self, TypeTag::Str | TypeTag::Obj(_) | TypeTag::Lib(_) | TypeTag::AnyObj | TypeTag::Null)
    }

    pub fn is_numeric(self) -> bool {
        matches!(self, TypeTag::Int | TypeTag::Char)
    }
}

#[derive(Debug, Clone, Error, PartialEq)]
pub enum ClassTableError {
    #[error("{span}: unresolved type `{name}`")]
    UnresolvedType { name: String, span: SourceSpan },
    #[error("{span}: inheritance cycle through `{name}`")]
    InheritanceCycle { name: String, span: SourceSpan },
    #[error("{span}: `{class}` declares `{signature}` twice")]
    SignatureClash { class: String, signature: String, span: SourceSpan },
    #[error("{span}: `{name}` cannot be used as a {role}")]
    InvalidSupertype { name: String, role: &'static str, span: SourceSpan },
}

impl ClassTableError {
    pub fn span(&self) -> &SourceSpan {
        match self {
            ClassTableError::UnresolvedType { span, .. }
            | ClassTableError::InheritanceCycle { span, .. }
            | ClassTableError::SignatureClash { span, .. }
            | ClassTableError::InvalidSupertype { span, .. } => span,
        }
    }
}

/// Method name plus parameter types; what overriding matches on.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Signature {
    pub name: String,
    pub params: Vec<TypeTag>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClassInfo {
    pub id: ClassId,
    pub name: String,
    pub is_interface: bool,
    pub superclass: Option<ClassId>,
    pub interfaces: Vec<ClassId>,
    /// Position of the declaration: (unit, index in unit).
    pub decl: (usize, usize),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MethodInfo {
    pub id: usize,
    pub mangled: String,
    pub name: String,
    pub class: ClassId,
    pub params: Vec<TypeTag>,
    pub ret: TypeTag,
    pub is_static: bool,
    pub is_ctor: bool,
    /// Declared without a body.
    pub is_abstract: bool,
    pub is_harness: bool,
    /// Index of the member inside its class declaration.
    pub member: usize,
    pub span: SourceSpan,
}

impl MethodInfo {
    pub fn signature(&self) -> Signature {
        Signature { name: self.name.clone(), params: self.params.clone() }
    }
}

/// One slot of the uniform object record.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FieldSlot {
    pub owner: ClassId,
    pub name: String,
    pub ty: TypeTag,
    pub is_static: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClassTable {
    pub classes: Vec<ClassInfo>,
    pub class_ids: IndexMap<String, ClassId>,
    pub methods: Vec<MethodInfo>,
    pub method_ids: IndexMap<String, usize>,
    /// `subcls[i][j]`: class `i` is `j` or a subtype of it.
    pub subcls: Vec<Vec<bool>>,
    pub field_layout: Vec<FieldSlot>,
    /// Per class: signature to the most-derived implementing method id.
    pub vtable: Vec<IndexMap<Signature, usize>>,
}

/// Name fragment of a type inside mangled names.
pub fn tag_name(tag: TypeTag, classes: &[ClassInfo]) -> String {
    match tag {
        TypeTag::Int => "int".into(),
        TypeTag::Bool => "boolean".into(),
        TypeTag::Str => "String".into(),
        TypeTag::Char => "char".into(),
        TypeTag::Void => "void".into(),
        TypeTag::Obj(id) => classes[id as usize].name.clone(),
        TypeTag::Lib(k) => k.name().into(),
        TypeTag::AnyObj => OBJECT.into(),
        TypeTag::Null => "null".into(),
    }
}

/// `<method>_<Class>` followed by `_<Type>` per parameter.
pub fn mangle_method(method: &str, class: &str, params: &[&str]) -> String {
    let mut s = format!("{}_{}", method, class);
    for p in params {
        s.push('_');
        s.push_str(p);
    }
    s
}

impl ClassTable {
    pub fn num_classes(&self) -> usize {
        self.classes.len()
    }

    pub fn id(&self, name: &str) -> Option<ClassId> {
        self.class_ids.get(name).copied()
    }

    pub fn class(&self, id: ClassId) -> &ClassInfo {
        &self.classes[id as usize]
    }

    pub fn is_subclass(&self, sub: ClassId, sup: ClassId) -> bool {
        self.subcls[sub as usize][sup as usize]
    }

    pub fn belongs_to(&self, method: usize) -> ClassId {
        self.methods[method].class
    }

    pub fn arg_num(&self, method: usize) -> usize {
        self.methods[method].params.len()
    }

    pub fn arg_type(&self, method: usize, pos: usize) -> TypeTag {
        self.methods[method].params[pos]
    }

    pub fn tag_name(&self, tag: TypeTag) -> String {
        tag_name(tag, &self.classes)
    }

    /// Type of a written type name.
    pub fn resolve_type(&self, ty: &TypeRef) -> Result<TypeTag, ClassTableError> {
        resolve_tag(&ty.name, &self.class_ids).ok_or_else(|| ClassTableError::UnresolvedType {
            name: ty.name.clone(),
            span: ty.span.clone(),
        })
    }

    /// Superclass chain starting at `id` itself.
    pub fn chain(&self, id: ClassId) -> Vec<ClassId> {
        let mut out = vec![id];
        let mut cur = self.classes[id as usize].superclass;
        while let Some(c) = cur {
            out.push(c);
            cur = self.classes[c as usize].superclass;
        }
        out
    }

    /// Every supertype of `id` including itself: chain first, then interfaces.
    pub fn supertypes(&self, id: ClassId) -> Vec<ClassId> {
        let mut out: Vec<ClassId> = self.chain(id);
        let mut i = 0;
        while i < out.len() {
            for &itf in &self.classes[out[i] as usize].interfaces {
                if !out.contains(&itf) {
                    out.push(itf);
                }
            }
            i += 1;
        }
        out
    }

    /// Slot of a field visible from `id`, searching supertypes in order.
    pub fn find_field(&self, id: ClassId, name: &str) -> Option<usize> {
        for c in self.supertypes(id) {
            if let Some(p) = self.field_layout.iter().position(|f| f.owner == c && f.name == name) {
                return Some(p);
            }
        }
        None
    }

    /// Methods named `name` visible from `id`, most-derived first, one per
    /// signature (overridden methods are hidden).
    pub fn visible_methods(&self, id: ClassId, name: &str) -> Vec<usize> {
        let mut out: Vec<usize> = Vec::new();
        for c in self.supertypes(id) {
            for m in self.methods.iter().filter(|m| m.class == c && m.name == name && !m.is_ctor) {
                if !out.iter().any(|&o| self.methods[o].params == m.params) {
                    out.push(m.id);
                }
            }
        }
        out
    }

    pub fn constructors(&self, id: ClassId) -> Vec<usize> {
        self.methods.iter().filter(|m| m.class == id && m.is_ctor).map(|m| m.id).collect()
    }

    /// Implementation of `sig` that an object of class `id` runs.
    pub fn lookup_vtable(&self, id: ClassId, sig: &Signature) -> Option<usize> {
        self.vtable[id as usize].get(sig).copied()
    }

    /// `dyn_dispatch_<method>_<params>`.
    pub fn dispatch_name(&self, sig: &Signature) -> String {
        let mut s = format!("dyn_dispatch_{}", sig.name);
        for p in &sig.params {
            s.push('_');
            s.push_str(&self.tag_name(*p));
        }
        s
    }

    /// Classes with an implementation of `sig`, ascending id.
    pub fn implementers(&self, sig: &Signature) -> Vec<(ClassId, usize)> {
        (0..self.classes.len() as ClassId).filter_map(|c| self.lookup_vtable(c, sig).map(|m| (c, m))).collect()
    }

    /// Plain-text dump of the tables.
    pub fn report(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "classes {}", self.classes.len());
        for c in &self.classes {
            let kind = if c.is_interface { "interface" } else { "class" };
            let sup = c.superclass.map(|x| self.class(x).name.clone()).unwrap_or_else(|| OBJECT.to_string());
            let _ = writeln!(s, "{} {} {} extends={}", c.id, kind, c.name, sup);
        }
        let _ = writeln!(s, "methods {}", self.methods.len());
        for m in &self.methods {
            let types: Vec<String> = m.params.iter().map(|t| self.tag_name(*t)).collect();
            let _ = writeln!(
                s,
                "{} {} belongs_to={} arg_num={} arg_type=[{}]",
                m.id,
                m.mangled,
                m.class,
                m.params.len(),
                types.join(",")
            );
        }
        let _ = writeln!(s, "fields {}", self.field_layout.len());
        for (i, f) in self.field_layout.iter().enumerate() {
            let kind = if f.is_static { " static" } else { "" };
            let _ = writeln!(s, "{} {}.{} {}{}", i, self.class(f.owner).name, f.name, self.tag_name(f.ty), kind);
        }
        let _ = writeln!(s, "subcls");
        for row in &self.subcls {
            let cells: Vec<&str> = row.iter().map(|b| if *b { "1" } else { "0" }).collect();
            let _ = writeln!(s, "{}", cells.join(" "));
        }
        s
    }
}

impl fmt::Display for ClassTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.report())
    }
}

fn resolve_tag(name: &str, ids: &IndexMap<String, ClassId>) -> Option<TypeTag> {
    Some(match name {
        "int" => TypeTag::Int,
        "boolean" => TypeTag::Bool,
        "String" => TypeTag::Str,
        "char" => TypeTag::Char,
        "void" => TypeTag::Void,
        OBJECT => TypeTag::AnyObj,
        _ => match ids.get(name) {
            Some(id) => TypeTag::Obj(*id),
            None => TypeTag::Lib(LibKind::from_type_name(name)?),
        },
    })
}

/// Builds the table from a normalized (flat) AST.
pub fn build_class_table(ast: &SketchAst) -> Result<ClassTable, ClassTableError> {
    let mut class_ids = IndexMap::new();
    let mut decls: Vec<(&TypeDecl, (usize, usize))> = Vec::new();
    for (u, unit) in ast.units.iter().enumerate() {
        for (i, d) in unit.types.iter().enumerate() {
            class_ids.insert(d.name.clone(), decls.len() as ClassId);
            decls.push((d, (u, i)));
        }
    }
    let resolve = |ty: &TypeRef| {
        resolve_tag(&ty.name, &class_ids)
            .ok_or_else(|| ClassTableError::UnresolvedType { name: ty.name.clone(), span: ty.span.clone() })
    };
    let class_ref = |ty: &TypeRef, want_interface: bool, role: &'static str| -> Result<ClassId, ClassTableError> {
        let id = *class_ids
            .get(&ty.name)
            .ok_or_else(|| ClassTableError::UnresolvedType { name: ty.name.clone(), span: ty.span.clone() })?;
        if decls[id as usize].0.is_interface() != want_interface {
            return Err(ClassTableError::InvalidSupertype { name: ty.name.clone(), role, span: ty.span.clone() });
        }
        Ok(id)
    };

    let mut classes = Vec::new();
    for (id, (d, pos)) in decls.iter().enumerate() {
        let superclass = match &d.extends {
            Some(e) if e.name != OBJECT => Some(class_ref(e, false, "superclass")?),
            _ => None,
        };
        let interfaces = d.interfaces.iter().map(|i| class_ref(i, true, "interface")).collect::<Result<_, _>>()?;
        classes.push(ClassInfo {
            id: id as ClassId,
            name: d.name.clone(),
            is_interface: d.is_interface(),
            superclass,
            interfaces,
            decl: *pos,
        });
    }

    // cycle check over extends and implements edges
    let n = classes.len();
    let mut state = vec![0u8; n];
    fn visit(c: usize, classes: &[ClassInfo], state: &mut [u8]) -> Option<usize> {
        match state[c] {
            1 => return Some(c),
            2 => return None,
            _ => {}
        }
        state[c] = 1;
        let info = &classes[c];
        for s in info.superclass.iter().chain(info.interfaces.iter()) {
            if let Some(x) = visit(*s as usize, classes, state) {
                return Some(x);
            }
        }
        state[c] = 2;
        None
    }
    for c in 0..n {
        if let Some(x) = visit(c, &classes, &mut state) {
            return Err(ClassTableError::InheritanceCycle { name: classes[x].name.clone(), span: decls[x].0.span.clone() });
        }
    }

    let mut subcls = vec![vec![false; n]; n];
    for (c, row) in subcls.iter_mut().enumerate() {
        let mut stack = vec![c];
        while let Some(x) = stack.pop() {
            if row[x] {
                continue;
            }
            row[x] = true;
            stack.extend(classes[x].superclass.iter().map(|s| *s as usize));
            stack.extend(classes[x].interfaces.iter().map(|s| *s as usize));
        }
    }

    let mut field_layout = Vec::new();
    let mut methods: Vec<MethodInfo> = Vec::new();
    let mut method_ids = IndexMap::new();
    for (id, (d, _)) in decls.iter().enumerate() {
        let id = id as ClassId;
        let mut seen: Vec<Signature> = Vec::new();
        for (mi, m) in d.members.iter().enumerate() {
            let (name, params, ret, is_static, is_ctor, is_abstract, is_harness, span) = match m {
                Member::Field(f) => {
                    field_layout.push(FieldSlot {
                        owner: id,
                        name: f.name.clone(),
                        ty: resolve(&f.ty)?,
                        is_static: f.modifiers.is_static(),
                    });
                    continue;
                }
                Member::Type(_) => continue,
                Member::Method(md) => (
                    md.name.clone(),
                    &md.params,
                    resolve(&md.ret)?,
                    md.modifiers.is_static(),
                    false,
                    md.body.is_none(),
                    md.modifiers.has(Modifier::Harness),
                    md.span.clone(),
                ),
                Member::Ctor(c) => {
                    (d.name.clone(), &c.params, TypeTag::Obj(id), false, true, false, false, c.span.clone())
                }
            };
            let params: Vec<TypeTag> = params.iter().map(|p| resolve(&p.ty)).collect::<Result<_, _>>()?;
            let sig = Signature { name: name.clone(), params: params.clone() };
            if seen.contains(&sig) {
                let shown: Vec<String> = params.iter().map(|t| tag_name(*t, &classes)).collect();
                return Err(ClassTableError::SignatureClash {
                    class: d.name.clone(),
                    signature: format!("{}({})", name, shown.join(", ")),
                    span,
                });
            }
            seen.push(sig);
            let names: Vec<String> = params.iter().map(|t| tag_name(*t, &classes)).collect();
            let refs: Vec<&str> = names.iter().map(|s| s.as_str()).collect();
            let base = mangle_method(&name, &d.name, &refs);
            let mut mangled = base.clone();
            let mut k = 2;
            while method_ids.contains_key(&mangled) {
                mangled = format!("{}_{}", base, k);
                k += 1;
            }
            let mid = methods.len();
            method_ids.insert(mangled.clone(), mid);
            methods.push(MethodInfo {
                id: mid,
                mangled,
                name,
                class: id,
                params,
                ret,
                is_static,
                is_ctor,
                is_abstract,
                is_harness,
                member: mi,
                span,
            });
        }
    }

    let mut vtable = Vec::with_capacity(n);
    for c in 0..n {
        let mut table = IndexMap::new();
        if !classes[c].is_interface {
            let mut cur = Some(c as ClassId);
            while let Some(x) = cur {
                for m in methods.iter().filter(|m| m.class == x && !m.is_static && !m.is_ctor && !m.is_abstract) {
                    table.entry(m.signature()).or_insert(m.id);
                }
                cur = classes[x as usize].superclass;
            }
        }
        vtable.push(table);
    }

    Ok(ClassTable { classes, class_ids, methods, method_ids, subcls, field_layout, vtable })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::desugar::{assign_unknown_ids, normalize, specialize_class_generators, UnknownBounds};
    use crate::frontend::parse_sources;

    fn table(src: &[(&str, &str)]) -> Result<ClassTable, ClassTableError> {
        let ast = parse_sources(src).unwrap();
        let (spec, _) = specialize_class_generators(&ast).unwrap();
        let (ids, _) = assign_unknown_ids(&spec, UnknownBounds::default());
        build_class_table(&normalize(&ids).unwrap())
    }

    #[test]
    fn mangling_examples() {
        assert_eq!(mangle_method("transition", "Automaton2", &["Token"]), "transition_Automaton2_Token");
        assert_eq!(mangle_method("mult2", "SimpleMath", &["int"]), "mult2_SimpleMath_int");
        assert_eq!(mangle_method("test", "Test", &[]), "test_Test");
        assert_eq!(mangle_inner("Monitor", "DBConnection"), "Monitor_DBConnection");
        assert_eq!(mangle_inner("A", "B"), "A_B");
    }

    #[test]
    fn single_class_matrix() {
        let t = table(&[("A.java", "class A {}")]).unwrap();
        assert_eq!(t.subcls, vec![vec![true]]);
    }

    #[test]
    fn chain_is_transitive() {
        let t = table(&[("A.java", "class A {} class B extends A {} class C extends B {}")]).unwrap();
        let (a, c) = (t.id("A").unwrap(), t.id("C").unwrap());
        assert!(t.is_subclass(c, a));
        assert!(!t.is_subclass(a, c));
    }

    #[test]
    fn automata_hierarchy() {
        let src = [
            ("Automaton.java", include_str!("../../sketches/automata/Automaton.java")),
            ("DBConnection.java", include_str!("../../sketches/automata/DBConnection.java")),
            ("CADsR.java", include_str!("../../sketches/automata/CADsR.java")),
        ];
        let t = table(&src).unwrap();
        let mon = t.id("Monitor_DBConnection").unwrap();
        assert!(t.is_subclass(mon, t.id("Automaton1").unwrap()));
        assert!(!t.is_subclass(mon, t.id("Automaton2").unwrap()));
        let tok = t.id("Token").unwrap();
        assert!(t.is_subclass(t.id("Token_1").unwrap(), tok));
        assert!(t.method_ids.contains_key("transition_Automaton2_Token"));
        let get_id = Signature { name: "getId".into(), params: vec![] };
        let names: Vec<_> = t.implementers(&get_id).iter().map(|(c, _)| t.class(*c).name.clone()).collect();
        assert_eq!(names, ["Token_1", "Token_2", "CharToken"]);
        assert_eq!(t.dispatch_name(&Signature { name: "transition".into(), params: vec![TypeTag::Obj(tok)] }),
            "dyn_dispatch_transition_Token");
    }

    #[test]
    fn errors() {
        assert!(matches!(table(&[("A.java", "class A { Foo f; }")]), Err(ClassTableError::UnresolvedType { .. })));
        assert!(matches!(
            table(&[("A.java", "class A extends B {} class B extends A {}")]),
            Err(ClassTableError::InheritanceCycle { .. })
        ));
        assert!(matches!(
            table(&[("A.java", "class A { int f(int x) { return 1; } int f(int y) { return 2; } }")]),
            Err(ClassTableError::SignatureClash { .. })
        ));
        assert!(matches!(
            table(&[("A.java", "interface I {} class A extends I {}")]),
            Err(ClassTableError::InvalidSupertype { .. })
        ));
    }

    #[test]
    fn same_field_name_in_two_classes_gets_two_slots() {
        let t = table(&[("A.java", "class A { int x; } class B { int x; }")]).unwrap();
        let xs: Vec<_> = t.field_layout.iter().filter(|f| f.name == "x").collect();
        assert_eq!(xs.len(), 2);
        assert_ne!(t.find_field(t.id("A").unwrap(), "x"), t.find_field(t.id("B").unwrap(), "x"));
    }

    #[test]
    fn report_rows_are_cells() {
        let t = table(&[("A.java", "class A {} class B extends A {}")]).unwrap();
        let r = t.report();
        assert!(r.ends_with("subcls\n1 0\n1 1\n"), "{r}");
    }
}
