use proptest::prelude::*;
use qca_core::geometry::{format_real, Point, Role, Rotation};
use qca_core::{
    builtin_layout, displace_cell, parse_layout, serialize_layout, Axis, BuiltinLayout, Cell,
    Layout,
};

/// Reals with at most three decimals so that canonical text is exact.
fn milli(lo: i32, hi: i32) -> impl Strategy<Value = f64> {
    (lo..hi).prop_map(|v| v as f64 / 1000.0)
}

prop_compose! {
    fn arb_cell(id: String, x: f64, y: f64)(
        size_milli in 10_000i64..20_000,
        frac in 1i64..=10,
        rot in prop::bool::ANY,
        zone in 0i64..4,
        role in 0u8..4,
        pol in milli(-1000, 1001),
    ) -> Cell {
        let role = [Role::Normal, Role::Input, Role::Output, Role::Fixed][role as usize];
        let mut b = Cell::builder(id.clone(), x, y)
            .size(size_milli as f64 / 1000.0)
            .dot_offset((size_milli * frac / 20) as f64 / 1000.0)
            .rotation(if rot { Rotation::Deg45 } else { Rotation::Deg0 })
            .clock_zone(zone)
            .role(role);
        if role == Role::Fixed {
            b = b.polarization(pol);
        }
        b.build().unwrap()
    }
}

fn arb_layout() -> impl Strategy<Value = Layout> {
    (1usize..7).prop_flat_map(|n| {
        // Sites of a 30 nm lattice keep cells of size < 20 apart.
        let cells: Vec<_> = (0..n)
            .map(|i| {
                let (x, y) = ((i % 3) as f64 * 30.0 - 12.345, (i / 3) as f64 * 30.0 + 0.5);
                arb_cell(format!("c{i}"), x, y)
            })
            .collect();
        cells.prop_filter_map("needs a driver", |mut cells| {
            if cells.iter().all(|c| !c.role().is_driver()) {
                let c0 = &cells[0];
                cells[0] = Cell::builder(c0.id(), c0.center().x, c0.center().y)
                    .size(c0.size())
                    .dot_offset(c0.dot_offset())
                    .rotation(c0.rotation())
                    .role(Role::Fixed)
                    .polarization(1.0)
                    .build()
                    .unwrap();
            }
            Layout::new("layout", cells).ok()
        })
    })
}

proptest! {
    #[test]
    fn serialize_then_parse_is_identity(layout in arb_layout()) {
        let text = serialize_layout(&layout);
        let back = parse_layout(&text).unwrap();
        prop_assert_eq!(serialize_layout(&back), text.clone());
        prop_assert_eq!(back.len(), layout.len());
        for (a, b) in layout.cells().iter().zip(back.cells()) {
            prop_assert_eq!(a.id(), b.id());
            prop_assert_eq!(a.role(), b.role());
            prop_assert_eq!(a.rotation(), b.rotation());
            prop_assert_eq!(a.clock_zone(), b.clock_zone());
            prop_assert_eq!(format_real(a.center().x), format_real(b.center().x));
            prop_assert_eq!(format_real(a.size()), format_real(b.size()));
            prop_assert_eq!(
                a.fixed_polarization().map(format_real),
                b.fixed_polarization().map(format_real)
            );
        }
    }

    #[test]
    fn dot_positions_are_translation_equivariant(
        x in -500.0f64..500.0, y in -500.0f64..500.0,
        dx in -100.0f64..100.0, dy in -100.0f64..100.0,
        size in 5.0f64..30.0, frac in 0.05f64..=0.5, rot in prop::bool::ANY,
    ) {
        let rotation = if rot { Rotation::Deg45 } else { Rotation::Deg0 };
        let build = |x, y| Cell::builder("c", x, y).size(size).dot_offset(size * frac).rotation(rotation).build().unwrap();
        let (a, b) = (build(x, y), build(x + dx, y + dy));
        let radius = if rot { size * frac } else { size * frac * 2f64.sqrt() };
        for (p, q) in a.dot_positions().iter().zip(b.dot_positions()) {
            prop_assert!((q.x - p.x - dx).abs() < 1e-9 && (q.y - p.y - dy).abs() < 1e-9);
            prop_assert!((p.distance(a.center()) - radius).abs() < 1e-9);
        }
    }

    #[test]
    fn displacement_touches_only_the_target(
        kind in prop::sample::select(vec![BuiltinLayout::Inv2, BuiltinLayout::Inv3, BuiltinLayout::Wire(4)]),
        gap in 0.1f64..10.0,
        new_gap in 0.1f64..10.0,
    ) {
        let layout = builtin_layout(kind, gap).unwrap();
        let out = layout.sole_output().unwrap().id().to_string();
        let prev = qca_core::geometry::previous_neighbor(&layout, &out).unwrap().center();
        let axis = Axis::toward(prev, layout.cell(&out).unwrap().center()).unwrap();
        let moved = displace_cell(&layout, &out, new_gap, axis).unwrap();
        prop_assert_eq!(moved.len(), layout.len());
        for (a, b) in layout.cells().iter().zip(moved.cells()) {
            if a.id() != out {
                prop_assert_eq!(a, b);
            }
        }
        let (t, p) = (moved.cell(&out).unwrap().center(), prev);
        let per_axis = (t.x - p.x).abs().max((t.y - p.y).abs()) - 18.0;
        prop_assert!((per_axis - new_gap).abs() < 1e-9);
    }
}

#[test]
fn inverters_have_one_output() {
    for kind in [BuiltinLayout::Inv2, BuiltinLayout::Inv3] {
        let l = builtin_layout(kind, 2.0).unwrap();
        assert_eq!(l.outputs().count(), 1, "{kind}");
    }
}

#[test]
fn displacement_along_x() {
    let inv3 = builtin_layout(BuiltinLayout::Inv3, 2.0).unwrap();
    let moved = displace_cell(&inv3, "out", 3.0, Axis::X).unwrap();
    assert_eq!(moved.cell("out").unwrap().center(), Point::new(21.0, 20.0));
}

#[test]
fn builtin_layouts_round_trip() {
    for kind in [BuiltinLayout::Inv2, BuiltinLayout::Inv3, BuiltinLayout::Majority, BuiltinLayout::Wire(5)] {
        let l = builtin_layout(kind, 2.0).unwrap();
        let back = parse_layout(&serialize_layout(&l)).unwrap();
        assert_eq!(back.cells(), l.cells(), "{kind}");
    }
}
