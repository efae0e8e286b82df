fn main() {
    println!("gausslab");
}
