fn main() {
    std::process::exit(iqa::cli::main());
}
