use std::ffi::{c_char, CStr, CString};
use std::ptr;

use strata_ffi::*;

/// Owned token list; keeps the name strings alive.
struct Tokens {
    _names: Vec<CString>,
    tokens: Vec<StrataToken>,
}

enum T<'a> {
    N(&'a str),
    I(usize),
}

fn tokens(parts: &[T]) -> Tokens {
    let mut names = Vec::new();
    let mut tokens = Vec::new();
    for p in parts {
        match p {
            T::N(s) => {
                let c = CString::new(*s).unwrap();
                tokens.push(StrataToken { name: c.as_ptr(), index: 0 });
                names.push(c);
            }
            T::I(i) => tokens.push(StrataToken { name: ptr::null(), index: *i }),
        }
    }
    Tokens { _names: names, tokens }
}

fn last_error() -> Option<String> {
    let p = strata_last_error();
    (!p.is_null()).then(|| unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned())
}

fn cstr(s: &str) -> CString {
    CString::new(s).unwrap()
}

unsafe fn leaf(name: &str, kind: StrataKindTag, len: usize) -> *mut StrataExpr {
    let mut out = ptr::null_mut();
    assert_eq!(strata_expr_leaf(cstr(name).as_ptr(), kind as u32, len, &mut out), StrataStatus::Ok);
    out
}

unsafe fn named(name: &str, parts: &[*mut StrataExpr]) -> *mut StrataExpr {
    let parts: Vec<*const StrataExpr> = parts.iter().map(|p| *p as *const _).collect();
    let mut cat = ptr::null_mut();
    assert_eq!(strata_expr_concat(parts.as_ptr(), parts.len(), &mut cat), StrataStatus::Ok);
    let mut out = ptr::null_mut();
    assert_eq!(strata_expr_bind(cstr(name).as_ptr(), cat, &mut out), StrataStatus::Ok);
    strata_expr_free(cat);
    out
}

unsafe fn copies(count: usize, e: *mut StrataExpr) -> *mut StrataExpr {
    let mut out = ptr::null_mut();
    assert_eq!(strata_expr_replicate(count, e, &mut out), StrataStatus::Ok);
    out
}

/// The quadrotor decision variables, built through the C interface.
unsafe fn quadrotor(n: usize) -> *mut StrataHierarchy {
    let position = leaf("position", StrataKindTag::Vector, 3);
    let orientation = leaf("orientation", StrataKindTag::Quaternion, 0);
    let linear = leaf("linear_velocity", StrataKindTag::Vector, 3);
    let angular = leaf("angular_velocity", StrataKindTag::Vector, 3);
    let rotor = leaf("rotor_speed", StrataKindTag::Scalar, 0);
    let x = named("x", &[position, orientation, linear, angular]);
    let xs = copies(n + 1, x);
    let big_x = named("X", &[xs]);
    let rotors = copies(4, rotor);
    let u = named("u", &[rotors]);
    let us = copies(n, u);
    let big_u = named("U", &[us]);
    let dv = named("decision_variables", &[big_x, big_u]);
    let mut h = ptr::null_mut();
    assert_eq!(strata_hierarchy_build(dv, &mut h), StrataStatus::Ok);
    for e in [position, orientation, linear, angular, rotor, x, xs, big_x, rotors, u, us, big_u, dv] {
        strata_expr_free(e);
    }
    h
}

unsafe fn resolve(h: *const StrataHierarchy, q: &[T]) -> Result<StrataSlot, StrataStatus> {
    let t = tokens(q);
    let mut slot = StrataSlot { offset: 0, size: 0, kind: StrataKindTag::Branch };
    match strata_hierarchy_resolve(h, t.tokens.as_ptr(), t.tokens.len(), &mut slot) {
        StrataStatus::Ok => Ok(slot),
        s => Err(s),
    }
}

#[test]
fn built_hierarchy_matches_reference_sizes_and_indices() {
    unsafe {
        let h = quadrotor(30);
        let mut size = 0;
        assert_eq!(strata_hierarchy_size(h, &mut size), StrataStatus::Ok);
        assert_eq!(size, 523);
        let cases: [(&[T], usize, usize); 5] = [
            (&[T::N("X"), T::N("x"), T::I(1)], 13, 13),
            (&[T::N("X"), T::N("x"), T::I(1), T::N("linear_velocity")], 20, 3),
            (&[T::N("U")], 403, 120),
            (&[T::N("U"), T::N("u"), T::I(1), T::N("rotor_speed"), T::I(1)], 403 + 5, 1),
            (&[T::N("linear_velocity"), T::I(1)], 20, 3),
        ];
        for (q, offset, len) in cases {
            let slot = resolve(h, q).unwrap();
            assert_eq!((slot.offset, slot.size), (offset, len));
        }
        let mut fixture = ptr::null_mut();
        assert_eq!(strata_fixture_quadrotor(30, &mut fixture), StrataStatus::Ok);
        let q = [T::N("orientation"), T::I(7)];
        assert_eq!(resolve(h, &q), resolve(fixture, &q));
        assert_eq!(resolve(h, &q).unwrap().kind, StrataKindTag::Quaternion);
        strata_hierarchy_free(fixture);
        strata_hierarchy_free(h);
    }
}

#[test]
fn resolution_errors_map_to_status_codes() {
    unsafe {
        let h = quadrotor(3);
        assert_eq!(resolve(h, &[T::N("position")]), Err(StrataStatus::Arity));
        assert_eq!(resolve(h, &[T::N("position"), T::I(9)]), Err(StrataStatus::IndexOutOfRange));
        assert_eq!(resolve(h, &[T::N("nowhere")]), Err(StrataStatus::UnknownPath));
        assert!(last_error().unwrap().contains("nowhere"));
        assert!(resolve(h, &[T::N("position"), T::I(0)]).is_ok());
        assert_eq!(last_error(), None);

        let a = leaf("c", StrataKindTag::Scalar, 0);
        let b = leaf("c", StrataKindTag::Vector, 2);
        let left = named("a", &[a]);
        let right = named("b", &[b]);
        let root = named("root", &[left, right]);
        let mut amb = ptr::null_mut();
        assert_eq!(strata_hierarchy_build(root, &mut amb), StrataStatus::Ok);
        assert_eq!(resolve(amb, &[T::N("c")]), Err(StrataStatus::Ambiguous));
        assert!(last_error().unwrap().contains("ambiguous"));
        for e in [a, b, left, right, root] {
            strata_expr_free(e);
        }
        strata_hierarchy_free(amb);
        strata_hierarchy_free(h);
    }
}

#[test]
fn textual_paths_resolve() {
    unsafe {
        let h = quadrotor(30);
        let mut slot = StrataSlot { offset: 0, size: 0, kind: StrataKindTag::Branch };
        let path = cstr("X, x, 1, linear_velocity");
        assert_eq!(strata_hierarchy_resolve_path(h, path.as_ptr(), &mut slot), StrataStatus::Ok);
        assert_eq!((slot.offset, slot.size, slot.kind), (20, 3, StrataKindTag::Vector));
        strata_hierarchy_free(h);
    }
}

#[test]
fn eager_and_lazy_maps_agree() {
    unsafe {
        let h = quadrotor(5);
        let mut eager = ptr::null_mut();
        let mut lazy = ptr::null_mut();
        assert_eq!(strata_eager_map_new(h, &mut eager), StrataStatus::Ok);
        assert_eq!(strata_lazy_map_new(h, &mut lazy), StrataStatus::Ok);
        strata_hierarchy_free(h);

        let mut buffer = vec![0.0; 5 * 4 + 6 * 13];
        let q = tokens(&[T::N("angular_velocity"), T::I(4)]);
        let values = [0.1, -0.2, 0.3];
        let (qp, qn) = (q.tokens.as_ptr(), q.tokens.len());
        assert_eq!(strata_eager_map_write(eager, qp, qn, values.as_ptr(), 3), StrataStatus::Ok);
        assert_eq!(
            strata_lazy_map_write(lazy, buffer.as_mut_ptr(), buffer.len(), qp, qn, values.as_ptr(), 3),
            StrataStatus::Ok
        );

        let (mut data, mut len) = (ptr::null_mut(), 0);
        assert_eq!(strata_eager_map_data(eager, &mut data, &mut len), StrataStatus::Ok);
        assert_eq!(std::slice::from_raw_parts(data, len), buffer.as_slice());

        let mut a = StrataSlot { offset: 0, size: 0, kind: StrataKindTag::Branch };
        let mut b = a;
        assert_eq!(strata_eager_map_locate(eager, qp, qn, &mut a), StrataStatus::Ok);
        assert_eq!(strata_lazy_map_locate(lazy, qp, qn, &mut b), StrataStatus::Ok);
        assert_eq!(a, b);

        let mut out = [0.0; 3];
        let mut n = 0;
        assert_eq!(strata_eager_map_read(eager, qp, qn, out.as_mut_ptr(), 3, &mut n), StrataStatus::Ok);
        assert_eq!((n, out), (3, values));
        out = [0.0; 3];
        assert_eq!(
            strata_lazy_map_read(lazy, buffer.as_ptr(), buffer.len(), qp, qn, out.as_mut_ptr(), 3, &mut n),
            StrataStatus::Ok
        );
        assert_eq!(out, values);

        strata_eager_map_free(eager);
        strata_lazy_map_free(lazy);
    }
}

#[test]
fn size_and_capacity_errors() {
    unsafe {
        let h = quadrotor(2);
        let mut eager = ptr::null_mut();
        let mut lazy = ptr::null_mut();
        assert_eq!(strata_eager_map_new(h, &mut eager), StrataStatus::Ok);
        assert_eq!(strata_lazy_map_new(h, &mut lazy), StrataStatus::Ok);
        let q = tokens(&[T::N("orientation"), T::I(1)]);
        let (qp, qn) = (q.tokens.as_ptr(), q.tokens.len());

        let mut n = 0;
        assert_eq!(strata_eager_map_read(eager, qp, qn, ptr::null_mut(), 0, &mut n), StrataStatus::BufferTooSmall);
        assert_eq!(n, 4);
        let three = [1.0; 3];
        assert_eq!(strata_eager_map_write(eager, qp, qn, three.as_ptr(), 3), StrataStatus::SizeMismatch);

        let mut short = vec![0.0; 10];
        assert_eq!(
            strata_lazy_map_write(lazy, short.as_mut_ptr(), short.len(), qp, qn, three.as_ptr(), 3),
            StrataStatus::SizeMismatch
        );
        assert!(last_error().unwrap().contains("size mismatch"));
        strata_eager_map_free(eager);
        strata_lazy_map_free(lazy);
        strata_hierarchy_free(h);
    }
}

#[test]
fn invalid_arguments() {
    unsafe {
        let mut out = ptr::null_mut();
        assert_eq!(strata_expr_leaf(ptr::null(), 0, 0, &mut out), StrataStatus::NullPointer);
        assert_eq!(strata_expr_leaf(cstr("v").as_ptr(), 1, 0, &mut out), StrataStatus::InvalidExpression);
        assert_eq!(strata_expr_leaf(cstr("v").as_ptr(), 42, 0, &mut out), StrataStatus::InvalidArgument);
        assert_eq!(strata_expr_leaf(cstr("v").as_ptr(), 3, 0, &mut out), StrataStatus::InvalidExpression);
        let bad = [0xffu8, 0];
        assert_eq!(strata_expr_leaf(bad.as_ptr() as *const c_char, 0, 0, &mut out), StrataStatus::InvalidUtf8);
        assert!(out.is_null());

        let s = leaf("s", StrataKindTag::Scalar, 0);
        assert_eq!(strata_expr_replicate(0, s, &mut out), StrataStatus::InvalidExpression);
        assert_eq!(strata_hierarchy_build(ptr::null(), ptr::null_mut()), StrataStatus::NullPointer);
        assert_eq!(strata_expr_concat(ptr::null(), 0, &mut out), StrataStatus::InvalidExpression);
        strata_expr_free(s);
        strata_expr_free(ptr::null_mut());
        assert_eq!(CStr::from_ptr(strata_status_name(StrataStatus::Ambiguous)).to_str(), Ok("ambiguous path"));
    }
}

#[test]
fn header_declares_the_interface() {
    let header = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/include/strata.h")).unwrap();
    for symbol in [
        "typedef struct StrataHierarchy StrataHierarchy;",
        "STRATA_STATUS_AMBIGUOUS = 6",
        "strata_hierarchy_resolve(",
        "strata_lazy_map_read(",
        "strata_last_error(void)",
    ] {
        assert!(header.contains(symbol), "missing {symbol}");
    }
}

#[test]
fn c_program_links_against_the_static_library() {
    let Some(cc) = ["cc", "gcc", "clang"]
        .into_iter()
        .find(|c| std::process::Command::new(c).arg("--version").output().is_ok_and(|o| o.status.success()))
    else {
        eprintln!("no C compiler found; skipping");
        return;
    };
    let exe = std::env::current_exe().unwrap();
    let profile_dir = exe.parent().unwrap().parent().unwrap();
    let lib = profile_dir.join("libstrata_ffi.a");
    assert!(lib.exists(), "{} not built", lib.display());
    let manifest = env!("CARGO_MANIFEST_DIR");
    let out = std::path::Path::new(env!("CARGO_TARGET_TMPDIR")).join("strata_smoke");
    let status = std::process::Command::new(cc)
        .args(["-std=c99", "-Wall", "-Werror", "-I"])
        .arg(format!("{manifest}/include"))
        .arg(format!("{manifest}/tests/c/smoke.c"))
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&out)
        .status()
        .unwrap();
    assert!(status.success());
    let run = std::process::Command::new(&out).output().unwrap();
    assert!(run.status.success(), "{}", String::from_utf8_lossy(&run.stderr));
    let expected = format!("size=523 offset=20 len=523 value=2 arity={}\n", StrataStatus::Arity as i32);
    assert_eq!(String::from_utf8_lossy(&run.stdout), expected);
}
