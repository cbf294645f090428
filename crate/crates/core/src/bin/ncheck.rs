fn main() {
    std::process::exit(nonclassicality::cli::main_exit_code());
}
