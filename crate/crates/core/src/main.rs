fn main() {
    std::process::exit(cib::cli::main());
}
