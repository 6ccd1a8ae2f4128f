fn main() {
    std::process::exit(p6groups::cli::main_with_env());
}
