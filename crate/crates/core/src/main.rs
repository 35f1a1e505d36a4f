fn main() {
    std::process::exit(polignac::cli::run());
}
