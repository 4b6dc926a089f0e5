fn main() {
    std::process::exit(sftlab::cli::main_with(std::env::args().collect()));
}
