//! Loads a field description from TOML and prints its structural data:
//! ellipticity, resonance, the Diophantine constant and derivative bounds.

use apcorr::field::{diophantine_constant, FieldSpec, WindingMatrix};

const SPEC: &str = r#"
lambda = 4.0
theta = 1.0
[winding]
rows = [[1.0, 0.0], [0.0, 1.0], [0.6180339887498949, 0.41421356237309515]]
[[entry]]
i = 0
j = 0
shift = 2.5
terms = [[1, 0, 0, 0.4, 0.0], [0, 1, 0, 0.4, 0.0], [0, 0, 1, 0.4, 0.0]]
[[entry]]
i = 1
j = 1
shift = 2.5
terms = [[1, 0, 0, 0.4, 0.0], [0, 1, 0, 0.4, 0.0], [0, 0, 1, 0.4, 0.0]]
"#;

fn main() -> apcorr::Result<()> {
    let spec = FieldSpec::parse(SPEC)?;
    let field = spec.build()?;
    let w = field.winding();
    println!(
        "d = {}, m = {}, Lambda = {}, symmetric = {}",
        field.dim(),
        w.torus_dim(),
        field.lambda(),
        field.is_symmetric()
    );
    match w.check_resonance(w.default_resonance_radius()) {
        Ok(()) => println!("no resonance up to |z| <= {}", w.default_resonance_radius()),
        Err(e) => println!("{e}"),
    }
    // integer vectors along the identity block leave one coordinate at zero
    match diophantine_constant(w, 1.0, 40) {
        Ok(dio) => println!("Diophantine constant A ~ {:.5} at z = {:?}", dio.a_est, dio.argmin_z),
        Err(e) => println!("not Diophantine coordinatewise: {e}"),
    }
    let golden = WindingMatrix::golden();
    let dio = diophantine_constant(&golden, 1.0, 200)?;
    println!(
        "golden lift: A ~ {:.5} (theta = 1), attained at z = {:?}",
        dio.a_est, dio.argmin_z
    );
    let q = field.as_quasi();
    for j in 0..=3 {
        let b = q
            .components()
            .iter()
            .map(|c| c.derivative_norm_bound(j))
            .fold(0.0, f64::max);
        println!("sup |D^{j} F| <= {b:.4}");
    }
    // midpoint of the unit square
    println!("a(0.5, 0.5) = {:?}", field.eval(&[0.5, 0.5]));
    Ok(())
}
