//! Class ids, the subclass relation, the uniform field layout and vtables.

use oosketch::classtable::build_class_table;
use oosketch::desugar::normalize;
use oosketch::frontend::parse_sources;
use oosketch::pipeline::format_tables;

pub fn main() {
    let src = "class Shape { int area() { return 0; } }
               class Square extends Shape { int side; int area() { return side * side; } }
               class Unit extends Square { Unit() { side = 1; } }";
    let ast = normalize(&parse_sources(&[("Shapes.java", src)]).unwrap()).unwrap();
    let table = build_class_table(&ast).unwrap();
    print!("{}", format_tables(&table));
    let unit = table.id("Unit").unwrap();
    let shape = table.id("Shape").unwrap();
    assert!(table.is_subclass(unit, shape));
    assert!(!table.is_subclass(shape, unit));
}
