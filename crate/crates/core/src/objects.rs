//! Classes, instantiation, and message dispatch.
//!
//! Dispatch looks at fields first, then searches the receiver's class and its
//! super chain for a method. The chain is single inheritance and acyclic,
//! because a super class must already be registered when its child is.

use std::collections::HashMap;
use std::sync::Arc;

use crate::error::{Error, Position, Result};
use crate::evaluator::{Ctx, Env, Interp, Object, Value};
use crate::reader::{Feature, LanguageLevel};
use crate::syntax::{CheckForm, ClassForm, ClassMember, Defn, Expr, Name};

#[derive(Debug, Clone, PartialEq)]
pub struct Method {
    pub name: Name,
    pub params: Arc<[Name]>,
    pub body: Arc<Expr>,
    pub pos: Position,
}

/// A level-4 constructor: parameters plus one initializer per field.
#[derive(Debug, Clone, PartialEq)]
pub struct Constructor {
    pub params: Arc<[Name]>,
    pub inits: Vec<Expr>,
    pub pos: Position,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClassDef {
    pub name: Name,
    pub super_name: Option<Name>,
    pub own_fields: Vec<Name>,
    /// Inherited fields first, then own fields. Filled in on registration.
    pub all_fields: Vec<Name>,
    pub methods: Vec<Method>,
    pub constructor: Option<Constructor>,
    /// Checks written in the class body, in source order.
    pub checks: Vec<CheckForm>,
    pub pos: Position,
}

impl ClassDef {
    pub fn from_form(form: &ClassForm) -> Self {
        let methods = form
            .methods()
            .map(|m| Method {
                name: m.name.clone(),
                params: m.params.clone().into(),
                body: Arc::new(m.body.clone()),
                pos: m.pos,
            })
            .collect();
        let checks = form
            .members
            .iter()
            .filter_map(|m| match m {
                ClassMember::Check(c) => Some(c.clone()),
                ClassMember::Method(_) => None,
            })
            .collect();
        ClassDef {
            name: form.name.clone(),
            super_name: form.super_name.clone(),
            own_fields: form.fields.clone(),
            all_fields: form.fields.clone(),
            methods,
            constructor: form.constructor.as_ref().map(|k| Constructor {
                params: k.params.clone().into(),
                inits: k.inits.clone(),
                pos: k.pos,
            }),
            checks,
            pos: form.pos,
        }
    }

    pub fn method(&self, name: &str) -> Option<&Method> {
        self.methods.iter().find(|m| m.name.as_ref() == name)
    }

    /// Number of arguments `new` expects.
    pub fn arity(&self) -> usize {
        match &self.constructor {
            Some(k) => k.params.len(),
            None => self.all_fields.len(),
        }
    }
}

/// Registered classes by name. Frozen once a program is loaded.
#[derive(Debug, Clone, Default)]
pub struct ClassTable {
    classes: HashMap<Name, Arc<ClassDef>>,
}

impl ClassTable {
    pub fn get(&self, name: &str) -> Option<&Arc<ClassDef>> {
        self.classes.get(name)
    }

    pub fn len(&self) -> usize {
        self.classes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.classes.is_empty()
    }

    pub fn names(&self) -> Vec<&str> {
        let mut names: Vec<&str> = self.classes.keys().map(|n| n.as_ref()).collect();
        names.sort_unstable();
        names
    }

    /// The class followed by its ancestors, most derived first.
    pub fn chain<'a>(&'a self, name: &str) -> impl Iterator<Item = &'a Arc<ClassDef>> + 'a {
        std::iter::successors(self.get(name), move |c| c.super_name.as_deref().and_then(|s| self.get(s)))
    }

    pub fn find_method(&self, class: &str, message: &str) -> Option<&Method> {
        self.chain(class).find_map(|c| c.method(message))
    }

    pub fn field_index(&self, class: &str, message: &str) -> Option<usize> {
        self.get(class)?.all_fields.iter().position(|f| f.as_ref() == message)
    }

    /// Whether instances of `class` have a method named `message`.
    pub fn responds_to(&self, class: &str, message: &str) -> bool {
        self.find_method(class, message).is_some()
    }

    /// Validates `def` against the table and the active level, then adds it.
    pub fn register(&mut self, mut def: ClassDef, level: LanguageLevel) -> Result<()> {
        let here = Some(def.pos);
        level.require(Feature::Classes, here)?;
        if self.classes.contains_key(&def.name) {
            return Err(Error::definition(here, format!("define-class: class `{}` is already defined", def.name)));
        }
        let inherited = match &def.super_name {
            None => Vec::new(),
            Some(parent) => {
                level.require(Feature::SuperClasses, here)?;
                match self.get(parent) {
                    Some(p) => p.all_fields.clone(),
                    None => {
                        return Err(Error::definition(
                            here,
                            format!("define-class: unknown super class `{parent}` for `{}`", def.name),
                        ))
                    }
                }
            }
        };
        for (i, f) in def.own_fields.iter().enumerate() {
            if def.own_fields[..i].contains(f) {
                return Err(Error::definition(here, format!("define-class: duplicate field `{f}` in `{}`", def.name)));
            }
            if inherited.contains(f) {
                return Err(Error::definition(
                    here,
                    format!("define-class: field `{f}` of `{}` collides with an inherited field", def.name),
                ));
            }
        }
        def.all_fields = inherited.into_iter().chain(def.own_fields.iter().cloned()).collect();

        for (i, m) in def.methods.iter().enumerate() {
            let at = Some(m.pos);
            if def.methods[..i].iter().any(|other| other.name == m.name) {
                return Err(Error::definition(at, format!("define-class: method `{}` is defined twice", m.name)));
            }
            if def.all_fields.contains(&m.name) {
                return Err(Error::definition(
                    at,
                    format!("define-class: method `{}` has the same name as a field", m.name),
                ));
            }
            if let Some(parent) = &def.super_name {
                if self.find_method(parent, &m.name).is_some() {
                    level.require(Feature::Overriding, at)?;
                }
            }
        }
        if let Some(k) = &def.constructor {
            level.require(Feature::Constructors, Some(k.pos))?;
            if k.inits.len() != def.all_fields.len() {
                return Err(Error::definition(
                    Some(k.pos),
                    format!(
                        "constructor: `{}` has {} field(s) but the constructor initializes {}",
                        def.name,
                        def.all_fields.len(),
                        k.inits.len()
                    ),
                ));
            }
        }
        self.classes.insert(def.name.clone(), Arc::new(def));
        Ok(())
    }
}

/// Rejects `this` anywhere but method bodies. Checks (even those written
/// inside a class) run at the top level, so they may not use it either.
pub fn check_this_placement(defns: &[Defn]) -> Result<()> {
    let uses_this = |e: &Expr| e.any(|x| matches!(x, Expr::This));
    let check_uses_this = |c: &CheckForm| {
        uses_this(&c.actual) || uses_this(&c.expected) || c.tolerance.as_ref().is_some_and(uses_this)
    };
    for d in defns {
        let bad = match d {
            Defn::Function { body, .. } => uses_this(body),
            Defn::Constant { value: e, .. } | Defn::Expr { expr: e, .. } | Defn::BigBang { world: e, .. } => uses_this(e),
            Defn::Check(c) => check_uses_this(c),
            Defn::Require { .. } => false,
            Defn::Class(class) => {
                for m in &class.members {
                    if let ClassMember::Check(c) = m {
                        if check_uses_this(c) {
                            return Err(Error::definition(
                                Some(c.pos),
                                "this: not allowed in a check-expect; checks run at the top level",
                            ));
                        }
                    }
                }
                if let Some(k) = &class.constructor {
                    if k.inits.iter().any(uses_this) {
                        return Err(Error::definition(Some(k.pos), "this: not allowed in a constructor"));
                    }
                }
                false
            }
        };
        if bad {
            return Err(Error::definition(Some(d.pos()), "this: can only be used inside a method"));
        }
    }
    Ok(())
}

impl Interp {
    /// `(new class arg ...)`.
    pub fn instantiate(&self, class: &str, args: Vec<Value>) -> Result<Value> {
        self.instantiate_at(class, args, 0)
    }

    /// Sends `message` with `args` to `receiver`.
    pub fn dispatch(&self, receiver: &Value, message: &str, args: Vec<Value>) -> Result<Value> {
        self.dispatch_at(receiver, message, args, 0)
    }

    pub(crate) fn instantiate_at(&self, class: &str, args: Vec<Value>, depth: usize) -> Result<Value> {
        let def = self.classes.get(class).ok_or_else(|| Error::runtime(format!("new: unknown class `{class}`")))?;
        if args.len() != def.arity() {
            return Err(Error::runtime(format!(
                "new: class `{class}` expects {} argument{}, but found {}",
                def.arity(),
                if def.arity() == 1 { "" } else { "s" },
                args.len()
            )));
        }
        let fields = match &def.constructor {
            None => args,
            Some(k) => {
                let depth = Self::enter(depth)?;
                let env = Env::empty().extend(k.params.clone(), args);
                let cx = Ctx { env: &env, this: None, depth };
                k.inits.iter().map(|e| self.eval(e, cx)).collect::<Result<Vec<_>>>()?
            }
        };
        Ok(Value::Object(Arc::new(Object { class: def.name.clone(), fields })))
    }

    pub(crate) fn dispatch_at(&self, receiver: &Value, message: &str, args: Vec<Value>, depth: usize) -> Result<Value> {
        let Value::Object(obj) = receiver else {
            return Err(Error::runtime(format!(
                "send: expected an object to receive message `{message}`, given {receiver}"
            )));
        };
        if let Some(i) = self.classes.field_index(&obj.class, message) {
            if !args.is_empty() {
                return Err(Error::runtime(format!(
                    "{message}: field of class `{}` expects 0 arguments, but found {}",
                    obj.class,
                    args.len()
                )));
            }
            return Ok(obj.fields[i].clone());
        }
        let Some(method) = self.classes.find_method(&obj.class, message) else {
            return Err(Error::runtime(format!(
                "object of class {} does not understand message {message}",
                obj.class
            )));
        };
        if args.len() != method.params.len() {
            return Err(Error::runtime(format!(
                "{message}: method of class `{}` expects {} argument{}, but found {}",
                obj.class,
                method.params.len(),
                if method.params.len() == 1 { "" } else { "s" },
                args.len()
            )));
        }
        let depth = Self::enter(depth)?;
        let env = Env::empty().extend(method.params.clone(), args);
        self.eval(&method.body, Ctx { env: &env, this: Some(obj), depth })
    }
}
