fn main() {
    std::process::exit(sp_normalized::cli::main_with_args(std::env::args_os()));
}
