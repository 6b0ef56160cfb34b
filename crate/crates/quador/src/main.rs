fn main() {
    println!("quador CLI: under construction");
}
