fn main() {
    let argv: Vec<String> = std::env::args().collect();
    std::process::exit(edgestat::cli::run(&argv));
}
