use edit2d::gas::GasModel;
use edit2d::interaction::three_shock_theory;

fn main() {
    let g = GasModel::new(1.4).unwrap();
    let ts = three_shock_theory(2.0, 14f64.to_radians(), &g).unwrap();
    println!("p_cd = {:.10}", ts.p_cd);
    println!("theta_cd = {:.6} deg", ts.theta_cd.to_degrees());
    println!("beta_rs = {:.6} deg", ts.beta_rs.to_degrees());
    println!("beta_ms = {:.6} deg", ts.beta_ms.to_degrees());
    println!("m3 = {:.8}, m4 = {:.8}", ts.m3, ts.m4);
}
