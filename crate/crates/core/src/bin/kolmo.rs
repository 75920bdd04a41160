fn main() {
    std::process::exit(kolmo_core::cli::main());
}
