//! Fill the hole and the choice in `mult2` so that `mult2(3) == 6`.

use oosketch::pipeline::{synthesize_sources, StageLog};
use oosketch::Options;

const SOURCES: &[(&str, &str)] = &[
    ("SimpleMath.java", include_str!("../sketches/mult2/SimpleMath.java")),
    ("Test.java", include_str!("../sketches/mult2/Test.java")),
];

pub fn main() {
    let mut log = StageLog::default();
    let syn = synthesize_sources(SOURCES, &Options::default(), &mut log).expect("mult2 solves");
    print!("{}", syn.files["SimpleMath.java"]);
    assert!(syn.files["SimpleMath.java"].contains("return 2 * x;"));
    for line in &log.lines {
        println!("{line}");
    }
}
