fn main() {
    std::process::exit(designrank::cli::main());
}
