fn main() {
    std::process::exit(permguard::cli::main_with(std::env::args_os()));
}
