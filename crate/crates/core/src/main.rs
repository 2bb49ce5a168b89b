fn main() {
    std::process::exit(fractalnet::cli::run(std::env::args()));
}
