fn main() {
    println!("qcpm");
}
