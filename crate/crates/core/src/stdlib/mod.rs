//! Native models of the library surface sketches may use: iterators, lists,
//! strings, string builders, and the string-to-token iterator.
//!
//! The heap and the builtin rules are generic over the value type so the
//! concrete interpreter and the symbolic executor share one definition.

use std::sync::Arc;

use crate::classtable::TypeTag;

/// Library types known to the type checker.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum LibKind {
    Iterator,
    List,
    StringBuilder,
}

impl LibKind {
    pub fn from_type_name(name: &str) -> Option<LibKind> {
        match name {
            "Iterator" => Some(LibKind::Iterator),
            "List" | "LinkedList" | "ArrayList" => Some(LibKind::List),
            "StringBuilder" => Some(LibKind::StringBuilder),
            _ => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            LibKind::Iterator => "Iterator",
            LibKind::List => "List",
            LibKind::StringBuilder => "StringBuilder",
        }
    }
}

/// How `StringBuilder.append` renders its argument.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum AppendKind {
    Int,
    Char,
    Bool,
    Str,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Builtin {
    IterHasNext,
    IterNext,
    ListNew,
    ListAdd,
    ListGet,
    ListSize,
    ListIterator,
    StrLength,
    StrCharAt,
    StrEquals,
    SbNew,
    SbAppend(AppendKind),
    SbToString,
    CharTokens,
}

impl Builtin {
    pub fn name(self) -> &'static str {
        match self {
            Builtin::IterHasNext => "Iterator.hasNext",
            Builtin::IterNext => "Iterator.next",
            Builtin::ListNew => "List.new",
            Builtin::ListAdd => "List.add",
            Builtin::ListGet => "List.get",
            Builtin::ListSize => "List.size",
            Builtin::ListIterator => "List.iterator",
            Builtin::StrLength => "String.length",
            Builtin::StrCharAt => "String.charAt",
            Builtin::StrEquals => "String.equals",
            Builtin::SbNew => "StringBuilder.new",
            Builtin::SbAppend(_) => "StringBuilder.append",
            Builtin::SbToString => "StringBuilder.toString",
            Builtin::CharTokens => "char_tokens",
        }
    }

    /// Result type of the call.
    pub fn ret(self) -> TypeTag {
        let key = match self {
            Builtin::SbAppend(_) => Builtin::SbAppend(AppendKind::Int),
            op => op,
        };
        CATALOG.iter().find(|s| s.op == key).map_or(TypeTag::Void, |s| s.ret)
    }

    /// True when the call changes heap state other than by allocating.
    pub fn mutates(self) -> bool {
        matches!(self, Builtin::IterNext | Builtin::ListAdd | Builtin::SbAppend(_))
    }
}

/// What a builtin is called on.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Receiver {
    Lib(LibKind),
    Str,
    /// Free function; no receiver.
    Free,
    /// `new` of a library type.
    New(LibKind),
}

/// Parameter constraint of a builtin.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ParamKind {
    Int,
    Str,
    /// Any value; lists hold erased elements.
    Any,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BuiltinSig {
    pub op: Builtin,
    pub receiver: Receiver,
    pub name: &'static str,
    pub params: &'static [ParamKind],
    pub ret: TypeTag,
}

const fn sig(op: Builtin, receiver: Receiver, name: &'static str, params: &'static [ParamKind], ret: TypeTag) -> BuiltinSig {
    BuiltinSig { op, receiver, name, params, ret }
}

use LibKind::*;
use ParamKind as P;

/// Every supported library entry point.
pub const CATALOG: &[BuiltinSig] = &[
    sig(Builtin::IterHasNext, Receiver::Lib(Iterator), "hasNext", &[], TypeTag::Bool),
    sig(Builtin::IterNext, Receiver::Lib(Iterator), "next", &[], TypeTag::AnyObj),
    sig(Builtin::ListNew, Receiver::New(List), "<init>", &[], TypeTag::Lib(List)),
    sig(Builtin::ListAdd, Receiver::Lib(List), "add", &[P::Any], TypeTag::Bool),
    sig(Builtin::ListGet, Receiver::Lib(List), "get", &[P::Int], TypeTag::AnyObj),
    sig(Builtin::ListSize, Receiver::Lib(List), "size", &[], TypeTag::Int),
    sig(Builtin::ListIterator, Receiver::Lib(List), "iterator", &[], TypeTag::Lib(Iterator)),
    sig(Builtin::StrLength, Receiver::Str, "length", &[], TypeTag::Int),
    sig(Builtin::StrCharAt, Receiver::Str, "charAt", &[P::Int], TypeTag::Char),
    sig(Builtin::StrEquals, Receiver::Str, "equals", &[P::Any], TypeTag::Bool),
    sig(Builtin::SbNew, Receiver::New(StringBuilder), "<init>", &[], TypeTag::Lib(StringBuilder)),
    sig(Builtin::SbAppend(AppendKind::Int), Receiver::Lib(StringBuilder), "append", &[P::Any], TypeTag::Lib(StringBuilder)),
    sig(Builtin::SbToString, Receiver::Lib(StringBuilder), "toString", &[], TypeTag::Str),
    sig(Builtin::CharTokens, Receiver::Free, "convertToIterator", &[P::Str], TypeTag::Lib(Iterator)),
    sig(Builtin::CharTokens, Receiver::Free, "char_tokens", &[P::Str], TypeTag::Lib(Iterator)),
];

/// Finds the catalog entry for a call shape.
pub fn lookup(receiver: Receiver, name: &str, argc: usize) -> Option<&'static BuiltinSig> {
    CATALOG.iter().find(|s| {
        s.receiver == receiver && s.params.len() == argc && (s.name == name || matches!(receiver, Receiver::New(_)))
    })
}

/// A reference value. Strings are immutable values, not heap objects.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Ref {
    Null,
    Obj(usize),
    Str(Arc<str>),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum IterState {
    List { list: usize, pos: usize },
    Chars { chars: Arc<[char]>, pos: usize },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum HeapObj<V> {
    /// A user object: class id plus one slot per entry of the field layout.
    Record { class: u32, slots: Vec<V> },
    List(Vec<V>),
    Iter(IterState),
    Builder(String),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Heap<V> {
    pub objs: Vec<HeapObj<V>>,
}

impl<V> Default for Heap<V> {
    fn default() -> Self {
        Heap { objs: Vec::new() }
    }
}

impl<V> Heap<V> {
    pub fn alloc(&mut self, obj: HeapObj<V>) -> usize {
        self.objs.push(obj);
        self.objs.len() - 1
    }
}

/// Value operations the builtin rules need.
pub trait Scalar: Clone {
    type Error;
    fn int(v: i64) -> Self;
    fn boolean(b: bool) -> Self;
    fn reference(r: Ref) -> Self;
    fn as_int(&self) -> Result<i64, Self::Error>;
    fn as_bool(&self) -> Result<bool, Self::Error>;
    fn as_ref(&self) -> Result<Ref, Self::Error>;
    fn trap(message: String) -> Self::Error;
}

/// Layout facts the builtins need to build char tokens.
#[derive(Clone, Debug)]
pub struct BuiltinCtx<V> {
    /// Class id and `id` slot of the char-token class, when the program has one.
    pub char_token: Option<(u32, usize)>,
    /// Default slot values of a fresh record.
    pub record_defaults: Vec<V>,
}

fn obj_index<V: Scalar>(v: &V) -> Result<usize, V::Error> {
    match v.as_ref()? {
        Ref::Obj(a) => Ok(a),
        Ref::Null => Err(V::trap("null receiver".into())),
        Ref::Str(_) => Err(V::trap("string used as object".into())),
    }
}

fn str_value<V: Scalar>(v: &V) -> Result<Arc<str>, V::Error> {
    match v.as_ref()? {
        Ref::Str(s) => Ok(s),
        Ref::Null => Err(V::trap("null string".into())),
        Ref::Obj(_) => Err(V::trap("object used as string".into())),
    }
}

/// Converts a code point to the interpreter's char value.
pub fn char_code(c: char) -> i64 {
    c as i64
}

fn render<V: Scalar>(kind: AppendKind, v: &V) -> Result<String, V::Error> {
    Ok(match kind {
        AppendKind::Int => v.as_int()?.to_string(),
        AppendKind::Char => {
            let code = v.as_int()?;
            char::from_u32(code as u32).ok_or_else(|| V::trap(format!("invalid char code {}", code)))?.to_string()
        }
        AppendKind::Bool => v.as_bool()?.to_string(),
        AppendKind::Str => match v.as_ref()? {
            Ref::Str(s) => s.to_string(),
            Ref::Null => "null".to_string(),
            Ref::Obj(a) => format!("@{}", a),
        },
    })
}

/// Runs one builtin. `args[0]` is the receiver for methods.
pub fn builtin_eval<V: Scalar>(op: Builtin, args: &[V], heap: &mut Heap<V>, ctx: &BuiltinCtx<V>) -> Result<V, V::Error> {
    match op {
        Builtin::ListNew => Ok(V::reference(Ref::Obj(heap.alloc(HeapObj::List(Vec::new()))))),
        Builtin::SbNew => Ok(V::reference(Ref::Obj(heap.alloc(HeapObj::Builder(String::new()))))),
        Builtin::CharTokens => {
            let s = str_value(&args[0])?;
            let chars: Arc<[char]> = s.chars().collect();
            Ok(V::reference(Ref::Obj(heap.alloc(HeapObj::Iter(IterState::Chars { chars, pos: 0 })))))
        }
        Builtin::StrLength => Ok(V::int(str_value(&args[0])?.chars().count() as i64)),
        Builtin::StrCharAt => {
            let s = str_value(&args[0])?;
            let i = args[1].as_int()?;
            let c = usize::try_from(i)
                .ok()
                .and_then(|i| s.chars().nth(i))
                .ok_or_else(|| V::trap(format!("charAt({}) out of bounds", i)))?;
            Ok(V::int(char_code(c)))
        }
        Builtin::StrEquals => {
            let s = str_value(&args[0])?;
            Ok(V::boolean(matches!(args[1].as_ref()?, Ref::Str(t) if t == s)))
        }
        Builtin::ListAdd => {
            let a = obj_index(&args[0])?;
            match &mut heap.objs[a] {
                HeapObj::List(items) => items.push(args[1].clone()),
                _ => return Err(V::trap("not a list".into())),
            }
            Ok(V::boolean(true))
        }
        Builtin::ListGet => {
            let a = obj_index(&args[0])?;
            let i = args[1].as_int()?;
            match &heap.objs[a] {
                HeapObj::List(items) => usize::try_from(i)
                    .ok()
                    .and_then(|i| items.get(i).cloned())
                    .ok_or_else(|| V::trap(format!("get({}) out of bounds", i))),
                _ => Err(V::trap("not a list".into())),
            }
        }
        Builtin::ListSize => {
            let a = obj_index(&args[0])?;
            match &heap.objs[a] {
                HeapObj::List(items) => Ok(V::int(items.len() as i64)),
                _ => Err(V::trap("not a list".into())),
            }
        }
        Builtin::ListIterator => {
            let a = obj_index(&args[0])?;
            if !matches!(heap.objs[a], HeapObj::List(_)) {
                return Err(V::trap("not a list".into()));
            }
            Ok(V::reference(Ref::Obj(heap.alloc(HeapObj::Iter(IterState::List { list: a, pos: 0 })))))
        }
        Builtin::IterHasNext => {
            let a = obj_index(&args[0])?;
            let more = match &heap.objs[a] {
                HeapObj::Iter(IterState::List { list, pos }) => match &heap.objs[*list] {
                    HeapObj::List(items) => *pos < items.len(),
                    _ => false,
                },
                HeapObj::Iter(IterState::Chars { chars, pos }) => *pos < chars.len(),
                _ => return Err(V::trap("not an iterator".into())),
            };
            Ok(V::boolean(more))
        }
        Builtin::IterNext => {
            let a = obj_index(&args[0])?;
            let (item, code) = match &mut heap.objs[a] {
                HeapObj::Iter(IterState::List { list, pos }) => {
                    let (list, p) = (*list, *pos);
                    *pos += 1;
                    match &heap.objs[list] {
                        HeapObj::List(items) if p < items.len() => (Some(items[p].clone()), None),
                        _ => return Err(V::trap("next() past the end".into())),
                    }
                }
                HeapObj::Iter(IterState::Chars { chars, pos }) => {
                    if *pos >= chars.len() {
                        return Err(V::trap("next() past the end".into()));
                    }
                    *pos += 1;
                    (None, Some(char_code(chars[*pos - 1])))
                }
                _ => return Err(V::trap("not an iterator".into())),
            };
            if let Some(item) = item {
                return Ok(item);
            }
            let (class, slot) = ctx.char_token.ok_or_else(|| V::trap("no char-token class".into()))?;
            let mut slots = ctx.record_defaults.clone();
            slots[slot] = V::int(code.unwrap());
            Ok(V::reference(Ref::Obj(heap.alloc(HeapObj::Record { class, slots }))))
        }
        Builtin::SbAppend(kind) => {
            let a = obj_index(&args[0])?;
            let text = render(kind, &args[1])?;
            match &mut heap.objs[a] {
                HeapObj::Builder(s) => s.push_str(&text),
                _ => return Err(V::trap("not a string builder".into())),
            }
            Ok(args[0].clone())
        }
        Builtin::SbToString => {
            let a = obj_index(&args[0])?;
            match &heap.objs[a] {
                HeapObj::Builder(s) => Ok(V::reference(Ref::Str(Arc::from(s.as_str())))),
                _ => Err(V::trap("not a string builder".into())),
            }
        }
    }
}

/// Code points of the tokens `char_tokens(s)` yields, in order.
pub fn char_tokens(s: &str) -> Vec<i64> {
    s.chars().map(char_code).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[derive(Clone, Debug, PartialEq)]
    enum V {
        I(i64),
        B(bool),
        R(Ref),
    }

    impl Scalar for V {
        type Error = String;
        fn int(v: i64) -> Self {
            V::I(v)
        }
        fn boolean(b: bool) -> Self {
            V::B(b)
        }
        fn reference(r: Ref) -> Self {
            V::R(r)
        }
        fn as_int(&self) -> Result<i64, String> {
            if let V::I(v) = self { Ok(*v) } else { Err("int".into()) }
        }
        fn as_bool(&self) -> Result<bool, String> {
            if let V::B(v) = self { Ok(*v) } else { Err("bool".into()) }
        }
        fn as_ref(&self) -> Result<Ref, String> {
            if let V::R(v) = self { Ok(v.clone()) } else { Err("ref".into()) }
        }
        fn trap(message: String) -> String {
            message
        }
    }

    fn ctx() -> BuiltinCtx<V> {
        BuiltinCtx { char_token: Some((7, 0)), record_defaults: vec![V::I(0)] }
    }

    fn s(x: &str) -> V {
        V::R(Ref::Str(Arc::from(x)))
    }

    /// Drains a char-token iterator, reading the `id` slot of every token.
    fn drain(text: &str) -> Vec<i64> {
        let mut heap = Heap::default();
        let c = ctx();
        let it = builtin_eval(Builtin::CharTokens, &[s(text)], &mut heap, &c).unwrap();
        let mut ids = Vec::new();
        while builtin_eval(Builtin::IterHasNext, std::slice::from_ref(&it), &mut heap, &c).unwrap() == V::B(true) {
            let V::R(Ref::Obj(t)) = builtin_eval(Builtin::IterNext, std::slice::from_ref(&it), &mut heap, &c).unwrap() else {
                panic!()
            };
            let HeapObj::Record { class: 7, slots } = &heap.objs[t] else { panic!() };
            ids.push(slots[0].as_int().unwrap());
        }
        assert!(builtin_eval(Builtin::IterNext, &[it], &mut heap, &c).is_err());
        ids
    }

    #[test]
    fn char_tokens_of_car() {
        assert_eq!(drain("car"), [99, 97, 114]);
        assert_eq!(drain(""), Vec::<i64>::new());
        assert_eq!(drain("cddr"), [99, 100, 100, 114]);
    }

    #[test]
    fn list_protocol() {
        let mut heap = Heap::default();
        let c = ctx();
        let l = builtin_eval(Builtin::ListNew, &[], &mut heap, &c).unwrap();
        builtin_eval(Builtin::ListAdd, &[l.clone(), V::I(10)], &mut heap, &c).unwrap();
        assert_eq!(builtin_eval(Builtin::ListSize, std::slice::from_ref(&l), &mut heap, &c).unwrap(), V::I(1));
        builtin_eval(Builtin::ListAdd, &[l.clone(), V::I(11)], &mut heap, &c).unwrap();
        let it = builtin_eval(Builtin::ListIterator, std::slice::from_ref(&l), &mut heap, &c).unwrap();
        let mut seen = Vec::new();
        seen.push(builtin_eval(Builtin::IterHasNext, std::slice::from_ref(&it), &mut heap, &c).unwrap());
        seen.push(builtin_eval(Builtin::IterNext, std::slice::from_ref(&it), &mut heap, &c).unwrap());
        seen.push(builtin_eval(Builtin::IterNext, std::slice::from_ref(&it), &mut heap, &c).unwrap());
        seen.push(builtin_eval(Builtin::IterHasNext, std::slice::from_ref(&it), &mut heap, &c).unwrap());
        assert_eq!(seen, [V::B(true), V::I(10), V::I(11), V::B(false)]);
        assert!(builtin_eval(Builtin::IterNext, &[it], &mut heap, &c).is_err());
        assert!(builtin_eval(Builtin::ListGet, &[l, V::I(2)], &mut heap, &c).is_err());
    }

    #[test]
    fn string_operations() {
        let mut heap = Heap::default();
        let c = ctx();
        assert_eq!(builtin_eval(Builtin::StrCharAt, &[s("cdr"), V::I(1)], &mut heap, &c).unwrap(), V::I(100));
        assert!(builtin_eval(Builtin::StrCharAt, &[s("cdr"), V::I(3)], &mut heap, &c).is_err());
        assert_eq!(builtin_eval(Builtin::StrLength, &[s("cdr")], &mut heap, &c).unwrap(), V::I(3));
        assert_eq!(builtin_eval(Builtin::StrEquals, &[s("a"), s("a")], &mut heap, &c).unwrap(), V::B(true));
        let sb = builtin_eval(Builtin::SbNew, &[], &mut heap, &c).unwrap();
        builtin_eval(Builtin::SbAppend(AppendKind::Str), &[sb.clone(), s("c")], &mut heap, &c).unwrap();
        builtin_eval(Builtin::SbAppend(AppendKind::Char), &[sb.clone(), V::I(97)], &mut heap, &c).unwrap();
        builtin_eval(Builtin::SbAppend(AppendKind::Int), &[sb.clone(), V::I(4)], &mut heap, &c).unwrap();
        assert_eq!(builtin_eval(Builtin::SbToString, &[sb], &mut heap, &c).unwrap(), s("ca4"));
    }

    #[test]
    fn catalog_lookup() {
        assert_eq!(lookup(Receiver::Free, "convertToIterator", 1).unwrap().op, Builtin::CharTokens);
        assert_eq!(lookup(Receiver::Lib(LibKind::List), "add", 1).unwrap().op, Builtin::ListAdd);
        assert!(lookup(Receiver::Lib(LibKind::List), "add", 2).is_none());
        assert_eq!(LibKind::from_type_name("LinkedList"), Some(LibKind::List));
    }

    proptest! {
        #[test]
        fn char_token_ids_are_code_points(text in "\\PC{0,12}") {
            let expected: Vec<i64> = text.chars().map(|c| u32::from(c) as i64).collect();
            prop_assert_eq!(drain(&text), expected.clone());
            prop_assert_eq!(char_tokens(&text), expected);
        }
    }
}
