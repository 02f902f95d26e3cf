fn main() {
    std::process::exit(crisis_sim::cli::main());
}
