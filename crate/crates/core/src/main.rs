fn main() {
    std::process::exit(pclab::cli::main_with_stdio());
}
