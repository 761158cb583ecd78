fn main() {
    std::process::exit(shhex_cli::main_with_args(std::env::args_os()));
}
