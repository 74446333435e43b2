fn main() {
    let argv: Vec<String> = std::env::args().collect();
    std::process::exit(renvol::cli::run(&argv));
}
